"""Points, characters and trigonometric polynomials on the truncated torus (T^n)^d.

Everything downstream computes inside the algebra of trigonometric
polynomials: finitely supported Fourier sums indexed by integer frequency
vectors. All operations here are pure; values are immutable after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Coefficients below this magnitude are dropped so supports stay finite.
PRUNE_TOL = 1e-15


def reduce_mod1(values) -> np.ndarray:
    """Fractional part mapped into [0, 1), with exact 1.0 folded to 0.0."""
    out = np.asarray(values, dtype=np.float64) % 1.0
    # np.mod can round a tiny negative input up to exactly 1.0
    out = np.where(out >= 1.0, 0.0, out)
    return out


@dataclass(frozen=True, eq=False)
class TorusPoint:
    """A point of (T^n)^d: d blocks of n coordinates, each in [0, 1)."""

    blocks: np.ndarray  # shape (d, n), float64

    def __post_init__(self):
        arr = reduce_mod1(self.blocks)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a (d, n) coordinate array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "blocks", arr)

    @property
    def d(self) -> int:
        return self.blocks.shape[0]

    @property
    def n(self) -> int:
        return self.blocks.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, TorusPoint) and np.array_equal(self.blocks, other.blocks)

    def __repr__(self) -> str:
        return f"TorusPoint({self.blocks.tolist()})"


@dataclass(frozen=True, eq=False)
class FrequencyVector:
    """An element of the dual group: d blocks of n integer frequencies."""

    blocks: np.ndarray  # shape (d, n), int64

    def __post_init__(self):
        arr = np.asarray(self.blocks)
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(arr)
            if not np.array_equal(rounded, arr):
                raise ValueError("frequency entries must be integers")
            arr = rounded
        arr = arr.astype(np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a (d, n) frequency array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "blocks", arr)

    @property
    def d(self) -> int:
        return self.blocks.shape[0]

    @property
    def n(self) -> int:
        return self.blocks.shape[1]

    @property
    def is_zero(self) -> bool:
        return not self.blocks.any()

    def __neg__(self) -> "FrequencyVector":
        return FrequencyVector(-self.blocks)

    def __eq__(self, other) -> bool:
        return isinstance(other, FrequencyVector) and np.array_equal(self.blocks, other.blocks)

    def __hash__(self) -> int:
        return hash((self.blocks.shape, self.blocks.tobytes()))

    def __repr__(self) -> str:
        return f"FrequencyVector({self.blocks.tolist()})"


def _check_same_shape(a, b, what: str):
    if a.blocks.shape != b.blocks.shape:
        raise ValueError(
            f"{what}: dimension mismatch {a.blocks.shape} vs {b.blocks.shape}"
        )


def torus_translate(p: TorusPoint, q: TorusPoint) -> TorusPoint:
    """Group operation on (T^n)^d: componentwise sum mod 1."""
    _check_same_shape(p, q, "torus_translate")
    return TorusPoint(p.blocks + q.blocks)


def char_eval(m: FrequencyVector, x: TorusPoint) -> complex:
    """Evaluate the character exp(2*pi*i * sum_{j,k} m_jk x_jk)."""
    _check_same_shape(m, x, "char_eval")
    return complex(np.exp(2j * np.pi * float(np.sum(m.blocks * x.blocks))))


class TrigPolynomial:
    """A finitely supported Fourier sum on (T^n)^depth.

    Coefficients are stored in a FrequencyVector -> complex mapping; zero
    coefficients are pruned on construction.
    """

    __slots__ = ("depth", "n", "_terms")

    def __init__(self, depth: int, n: int, terms=None):
        if depth < 1 or n < 1:
            raise ValueError("depth and n must be >= 1")
        self.depth = int(depth)
        self.n = int(n)
        clean: dict[FrequencyVector, complex] = {}
        for freq, coeff in (terms or {}).items():
            if not isinstance(freq, FrequencyVector):
                freq = FrequencyVector(np.asarray(freq))
            if freq.d != self.depth or freq.n != self.n:
                raise ValueError(
                    f"term shape {freq.blocks.shape} does not match ({depth}, {n})"
                )
            c = complex(coeff)
            if abs(c) > PRUNE_TOL:
                clean[freq] = clean.get(freq, 0.0) + c
        self._terms = {f: c for f, c in clean.items() if abs(c) > PRUNE_TOL}

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, depth: int, n: int) -> "TrigPolynomial":
        return cls(depth, n, {})

    @classmethod
    def constant(cls, depth: int, n: int, value: complex) -> "TrigPolynomial":
        zero = FrequencyVector(np.zeros((depth, n), dtype=np.int64))
        return cls(depth, n, {zero: value})

    @classmethod
    def character(cls, freq: FrequencyVector, coeff: complex = 1.0) -> "TrigPolynomial":
        return cls(freq.d, freq.n, {freq: coeff})

    @classmethod
    def cosine(cls, depth: int, n: int, block: int, coord: int,
               amplitude: float = 1.0) -> "TrigPolynomial":
        """amplitude * cos(2*pi*x_{block,coord}), with 1-based block/coord."""
        m = np.zeros((depth, n), dtype=np.int64)
        m[block - 1, coord - 1] = 1
        e = FrequencyVector(m)
        return cls(depth, n, {e: amplitude / 2.0, -e: amplitude / 2.0})

    # -- access -----------------------------------------------------------

    def terms(self):
        return self._terms.items()

    def coefficient(self, m: FrequencyVector) -> complex:
        return self._terms.get(m, 0.0)

    @property
    def support_size(self) -> int:
        return len(self._terms)

    def _check_compatible(self, other: "TrigPolynomial"):
        if self.depth != other.depth or self.n != other.n:
            raise ValueError(
                f"domain mismatch: ({self.depth},{self.n}) vs ({other.depth},{other.n})"
            )

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        self._check_compatible(other)
        merged = dict(self._terms)
        for f, c in other._terms.items():
            merged[f] = merged.get(f, 0.0) + c
        return TrigPolynomial(self.depth, self.n, merged)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + other.scale(-1.0)

    def __mul__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        self._check_compatible(other)
        out: dict[FrequencyVector, complex] = {}
        for f1, c1 in self._terms.items():
            for f2, c2 in other._terms.items():
                f = FrequencyVector(f1.blocks + f2.blocks)
                out[f] = out.get(f, 0.0) + c1 * c2
        return TrigPolynomial(self.depth, self.n, out)

    def scale(self, c: complex) -> "TrigPolynomial":
        return TrigPolynomial(self.depth, self.n,
                              {f: c * v for f, v in self._terms.items()})

    def conjugate(self) -> "TrigPolynomial":
        return TrigPolynomial(self.depth, self.n,
                              {-f: np.conj(v) for f, v in self._terms.items()})

    def map_coefficients(self, fn) -> "TrigPolynomial":
        """New polynomial with coefficient(m) replaced by fn(m, coefficient(m))."""
        return TrigPolynomial(self.depth, self.n,
                              {f: fn(f, v) for f, v in self._terms.items()})

    def is_real(self, tol: float = 1e-12) -> bool:
        """Hermitian symmetry check: coefficient(-m) == conj(coefficient(m))."""
        for f, c in self._terms.items():
            if abs(self._terms.get(-f, 0.0) - np.conj(c)) > tol:
                return False
        return True

    # -- evaluation and integration ----------------------------------------

    def eval(self, x: TorusPoint) -> complex:
        if (x.d, x.n) != (self.depth, self.n):
            raise ValueError(
                f"point shape ({x.d},{x.n}) does not match ({self.depth},{self.n})"
            )
        if not self._terms:
            return 0.0 + 0.0j
        freqs = np.stack([f.blocks for f in self._terms])
        coeffs = np.array(list(self._terms.values()))
        phases = TWO_PI * np.tensordot(freqs, x.blocks, axes=([1, 2], [0, 1]))
        return complex(np.sum(coeffs * np.exp(1j * phases)))

    def integral(self) -> complex:
        """Haar integral: the coefficient at the zero frequency."""
        zero = FrequencyVector(np.zeros((self.depth, self.n), dtype=np.int64))
        return complex(self._terms.get(zero, 0.0))

    def to_records(self) -> list[dict]:
        """JSON-serializable list of {frequency, re, im} records."""
        recs = []
        for f in sorted(self._terms, key=lambda f: f.blocks.tobytes()):
            c = self._terms[f]
            recs.append({"frequency": f.blocks.tolist(),
                         "re": float(c.real), "im": float(c.imag)})
        return recs

    @classmethod
    def from_records(cls, depth: int, n: int, records) -> "TrigPolynomial":
        terms = {}
        for rec in records:
            f = FrequencyVector(np.asarray(rec["frequency"], dtype=np.int64))
            c = complex(rec.get("re", 0.0), rec.get("im", 0.0))
            terms[f] = terms.get(f, 0.0) + c
        return cls(depth, n, terms)

    def __repr__(self) -> str:
        return f"TrigPolynomial(depth={self.depth}, n={self.n}, terms={len(self._terms)})"


def trig_algebra(P: TrigPolynomial, Q: TrigPolynomial | None, op: str,
                 c: complex = None) -> TrigPolynomial:
    """Coefficient algebra dispatcher: op in {'add', 'mul', 'conj', 'scale'}."""
    if op == "add":
        return P + Q
    if op == "mul":
        return P * Q
    if op == "conj":
        return P.conjugate()
    if op == "scale":
        if c is None:
            raise ValueError("scale requires a scalar argument")
        return P.scale(c)
    raise ValueError(f"unknown operation {op!r}")


def trig_eval(P: TrigPolynomial, x: TorusPoint) -> complex:
    return P.eval(x)


def trig_integral(P: TrigPolynomial) -> complex:
    return P.integral()
