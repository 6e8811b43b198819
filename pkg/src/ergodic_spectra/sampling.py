"""Reproducible quadrature point sets on (T^n)^d.

Three samplers: counter-based Monte Carlo (Philox keyed by seed and point
index, so the point sequence is independent of execution order), a rank-1
lattice whose generating vector comes from square roots of the first d*n
primes, and the plain Kronecker sequence with the same direction. For the
deterministic kinds the error bar is the spread over 8 random shifts; the
point budget `count` is split across the shifts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SHIFTS = 8


def first_primes(count: int) -> np.ndarray:
    """The first `count` primes, by trial division (count stays desk-scale)."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return np.array(primes, dtype=np.float64)


def kronecker_direction(dims: int) -> np.ndarray:
    """Fractional parts of sqrt(p_k) for the first `dims` primes."""
    return np.sqrt(first_primes(dims)) % 1.0


@dataclass(frozen=True)
class Sampler:
    """A reproducible point set: identical fields give identical points."""

    kind: str          # "monte_carlo" | "rank1_lattice" | "kronecker"
    seed: int
    count: int
    dims: tuple        # (d, n)
    shifts: int = DEFAULT_SHIFTS

    def __post_init__(self):
        if self.kind not in ("monte_carlo", "rank1_lattice", "kronecker"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.count < 2:
            raise ValueError("sampler needs count >= 2")
        if self.kind != "monte_carlo":
            if self.shifts < 2:
                raise ValueError("shifted samplers need shifts >= 2")
            if self.count % self.shifts:
                raise ValueError(
                    f"count={self.count} must be divisible by shifts={self.shifts}")

    @property
    def d(self) -> int:
        return self.dims[0]

    @property
    def n(self) -> int:
        return self.dims[1]

    def group_size(self) -> int:
        """Points per shift group (Monte Carlo is one group)."""
        return self.count if self.kind == "monte_carlo" else self.count // self.shifts

    def points(self) -> np.ndarray:
        """The full point set, shape (count, d, n), values in [0, 1).

        Shifted kinds lay out the groups contiguously: group s occupies rows
        [s*group_size, (s+1)*group_size).
        """
        d, n = self.dims
        dim = d * n
        if self.kind == "monte_carlo":
            flat = np.empty((self.count, dim))
            for i in range(self.count):
                gen = np.random.Generator(
                    np.random.Philox(key=self.seed, counter=i << 64))
                flat[i] = gen.random(dim)
            return flat.reshape(self.count, d, n)

        m = self.group_size()
        shift_gen = np.random.Generator(np.random.Philox(key=self.seed))
        shifts = shift_gen.random((self.shifts, dim))
        idx = np.arange(m, dtype=np.float64)[:, None]
        if self.kind == "rank1_lattice":
            z = np.rint(kronecker_direction(dim) * m).astype(np.int64) | 1
            base = idx * (z.astype(np.float64) / m)
        else:  # kronecker
            base = idx * kronecker_direction(dim)
        groups = [(base + shifts[s]) % 1.0 for s in range(self.shifts)]
        pts = np.concatenate(groups)
        pts[pts >= 1.0] = 0.0
        return pts.reshape(self.count, d, n)

    def record(self) -> dict:
        return {"kind": self.kind, "seed": int(self.seed), "count": int(self.count),
                "dims": list(self.dims), "shifts": int(self.shifts)}


def group_statistics(values: np.ndarray, sampler: Sampler) -> tuple[complex, float]:
    """Quadrature mean and standard error from per-point values.

    Monte Carlo: sample mean and its standard error. Shifted samplers: mean
    of the per-shift means and their spread over shifts.
    """
    if sampler.kind == "monte_carlo":
        mean = complex(np.mean(values))
        var = np.sum(np.abs(values - mean) ** 2) / (len(values) * (len(values) - 1))
        return mean, float(np.sqrt(var))
    m = sampler.group_size()
    shift_means = values.reshape(sampler.shifts, m).mean(axis=1)
    mean = complex(np.mean(shift_means))
    var = np.sum(np.abs(shift_means - mean) ** 2) / (sampler.shifts * (sampler.shifts - 1))
    return mean, float(np.sqrt(var))


def integrate(f, sampler: Sampler) -> tuple[complex, float]:
    """Haar integral estimate of a batch evaluator f: (P, d, n) -> complex (P,)."""
    pts = sampler.points()
    values = np.asarray(f(pts), dtype=np.complex128)
    if values.shape != (sampler.count,):
        raise ValueError("integrand must return one value per point")
    return group_statistics(values, sampler)
