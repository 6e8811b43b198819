"""The triangular skew-product map on (T^n)^d and its cocycles.

The map rotates the first block by alpha and shifts every later block j by
phi_{j-1}(x_1, ..., x_{j-1}), where phi_{j-1} is an integer-matrix
homomorphism plus a real trigonometric-polynomial perturbation. The
homomorphism block acting on the newest factor must be nonsingular so that
every nontrivial character stays coupled to the flow.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .flow import FlowDirection, visibly_rational
from .torus import FrequencyVector, TorusPoint, TrigPolynomial, char_eval, reduce_mod1

# Imaginary residue allowed when evaluating a real-valued perturbation.
IMAG_TOL = 1e-12

COCYCLE_RENORM_PERIOD = 1024

# Beyond this orbit length the polynomially growing coordinate derivative
# starts eating into double precision; runs only warn, they do not stop.
ORBIT_LENGTH_GUIDANCE = 10 ** 6


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" | "warning"
    message: str


@dataclass(frozen=True)
class SystemConfig:
    """Full description of the skew product on (T^n)^d.

    xi[j-2][i-1] is the integer n x n matrix M_{j,i} coupling block i into
    block j; eta[j-2][k-1] is the real trig-polynomial lift of coordinate k
    of the perturbation of block j, living on the first j-1 factors.
    """

    n: int
    d: int
    alpha: np.ndarray                       # (n,)
    xi: tuple                               # xi[j-2] = tuple of j-1 int matrices (n, n)
    eta: tuple                              # eta[j-2] = tuple of n TrigPolynomial
    flow: FlowDirection
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        alpha = reduce_mod1(np.asarray(self.alpha, dtype=np.float64).reshape(-1))
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if alpha.size != self.n:
            raise ValueError(f"alpha has length {alpha.size}, expected n={self.n}")
        if len(self.xi) != self.d - 1 or len(self.eta) != self.d - 1:
            raise ValueError("xi and eta must have one entry per factor j = 2..d")
        xi = []
        for j in range(2, self.d + 1):
            mats = self.xi[j - 2]
            if len(mats) != j - 1:
                raise ValueError(f"xi for factor {j} must hold {j - 1} matrices")
            frozen = []
            for M in mats:
                M = np.asarray(M)
                if M.shape != (self.n, self.n):
                    raise ValueError(f"xi matrix for factor {j} has shape {M.shape}")
                M = M.astype(np.int64)
                M.setflags(write=False)
                frozen.append(M)
            xi.append(tuple(frozen))
            polys = self.eta[j - 2]
            if len(polys) != self.n:
                raise ValueError(f"eta for factor {j} must hold n={self.n} polynomials")
            for P in polys:
                if P.depth != j - 1 or P.n != self.n:
                    raise ValueError(
                        f"eta polynomial for factor {j} must live on (T^{self.n})^{j - 1}")
        object.__setattr__(self, "xi", tuple(xi))
        object.__setattr__(self, "eta", tuple(tuple(p) for p in self.eta))
        if self.flow.n != self.n:
            raise ValueError("flow dimension does not match n")

    def xi_mats(self, j: int) -> tuple:
        """Matrices (M_{j,1}, ..., M_{j,j-1}) for target block j."""
        return self.xi[j - 2]

    def eta_polys(self, j: int) -> tuple:
        """Perturbation lifts (one per coordinate) for target block j."""
        return self.eta[j - 2]

    def is_affine(self) -> bool:
        return all(P.support_size == 0 for polys in self.eta for P in polys)


def as_chi(chi, n: int) -> np.ndarray:
    """Normalize a one-factor character to an int64 frequency row of length n."""
    if isinstance(chi, FrequencyVector):
        arr = chi.blocks.reshape(-1)
    else:
        arr = np.asarray(chi).reshape(-1)
    arr = arr.astype(np.int64)
    if arr.size != n:
        raise ValueError(f"character has {arr.size} frequencies, expected {n}")
    return arr


def validate_config(cfg: SystemConfig) -> list[Diagnostic]:
    """Structural checks; errors for broken contracts, warnings for suspicions."""
    out: list[Diagnostic] = []
    for j in range(2, cfg.d + 1):
        M_last = cfg.xi_mats(j)[j - 2]
        det = round(float(np.linalg.det(M_last.astype(np.float64))))
        if det == 0:
            out.append(Diagnostic(
                "error",
                f"homomorphism condition violated: det(M_{{{j},{j - 1}}}) = 0 "
                "kills a nontrivial character"))
        for k, P in enumerate(cfg.eta_polys(j), start=1):
            if not P.is_real():
                out.append(Diagnostic(
                    "error",
                    f"perturbation not real-valued: eta[{j}][{k}] breaks "
                    "Hermitian coefficient symmetry"))
    for name, vec in (("alpha", cfg.alpha), ("flow", cfg.flow.v)):
        for k, x in enumerate(vec, start=1):
            if visibly_rational(float(x)):
                out.append(Diagnostic(
                    "warning",
                    f"{name}[{k}] = {x} looks rational; rational independence "
                    "is a contract, not a verified property"))
    return out


def phi_eval(cfg: SystemConfig, j: int, x: TorusPoint) -> np.ndarray:
    """The coupling map phi_{j-1}(x_1..x_{j-1}) in [0,1)^n for 2 <= j <= d."""
    if not 2 <= j <= cfg.d:
        raise ValueError(f"factor index {j} out of range 2..{cfg.d}")
    out = np.zeros(cfg.n)
    for i, M in enumerate(cfg.xi_mats(j), start=1):
        out += M @ x.blocks[i - 1]
    for k, P in enumerate(cfg.eta_polys(j)):
        if P.support_size:
            sub = TorusPoint(x.blocks[: j - 1])
            val = P.eval(sub)
            if abs(val.imag) > IMAG_TOL:
                raise ArithmeticError(
                    f"perturbation eta[{j}][{k + 1}] produced imaginary residue {val.imag}")
            out[k] += val.real
    return reduce_mod1(out)


def apply_T(cfg: SystemConfig, x: TorusPoint, depth: int | None = None) -> TorusPoint:
    """One forward step of the skew product restricted to the first `depth` blocks."""
    depth = cfg.d if depth is None else depth
    blocks = np.array(x.blocks)
    # phi_{j-1} reads only blocks < j, so updating top-down works in place
    for j in range(depth, 1, -1):
        blocks[j - 1] = blocks[j - 1] + phi_eval(cfg, j, TorusPoint(blocks))
    blocks[0] += cfg.alpha
    return TorusPoint(blocks)


def apply_T_inverse(cfg: SystemConfig, x: TorusPoint, depth: int | None = None) -> TorusPoint:
    """Triangular back-substitution: block 1 first, then each later block."""
    depth = cfg.d if depth is None else depth
    blocks = np.array(x.blocks)
    blocks[0] -= cfg.alpha
    for j in range(2, depth + 1):
        blocks[j - 1] = blocks[j - 1] - phi_eval(cfg, j, TorusPoint(blocks))
    return TorusPoint(blocks)


def orbit(cfg: SystemConfig, x0: TorusPoint, N: int,
          direction: str = "forward", depth: int | None = None) -> Iterator[TorusPoint]:
    """Lazily yield x0, T x0, ..., T^{N-1} x0 (or inverse iterates)."""
    if N < 0:
        raise ValueError("orbit length must be >= 0")
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    step = apply_T if direction == "forward" else apply_T_inverse
    x = x0
    for _ in range(N):
        yield x
        x = step(cfg, x, depth=depth)


def cocycle_eval(cfg: SystemConfig, j: int, chi, x: TorusPoint, N: int) -> complex:
    """Product of chi(phi_{j-1}) along the length-N orbit of x under T_{j-1}.

    The true cocycle is unimodular; the running product is renormalized to
    unit modulus every COCYCLE_RENORM_PERIOD steps to stop drift.
    """
    chi_arr = as_chi(chi, cfg.n)
    if not chi_arr.any():
        raise ValueError("trivial character is excluded from the decomposition")
    if not 2 <= j <= cfg.d:
        raise ValueError(f"factor index {j} out of range 2..{cfg.d}")
    prod = 1.0 + 0.0j
    cur = x
    for step in range(N):
        prod *= np.exp(2j * np.pi * float(chi_arr @ phi_eval(cfg, j, cur)))
        if (step + 1) % COCYCLE_RENORM_PERIOD == 0:
            prod /= abs(prod)
        cur = apply_T(cfg, cur, depth=j - 1)
    return complex(prod)


# -- configuration serialization -------------------------------------------


def config_to_json_dict(cfg: SystemConfig) -> dict:
    """Canonical JSON form (explicit vectors, sorted term records)."""
    return {
        "n": cfg.n,
        "d": cfg.d,
        "alpha": [float(a) for a in cfg.alpha],
        "xi": [[M.tolist() for M in cfg.xi_mats(j)] for j in range(2, cfg.d + 1)],
        "eta": [[P.to_records() for P in cfg.eta_polys(j)] for j in range(2, cfg.d + 1)],
        "flow": [float(v) for v in cfg.flow.v],
    }


def config_from_json_dict(data: dict) -> SystemConfig:
    n = int(data["n"])
    d = int(data["d"])

    alpha_spec = data.get("alpha", {"sqrt_primes": True})
    if isinstance(alpha_spec, dict):
        if not alpha_spec.get("sqrt_primes"):
            raise ValueError(f"unknown alpha specification {alpha_spec!r}")
        from .sampling import first_primes
        alpha = np.sqrt(first_primes(n)) % 1.0
    else:
        alpha = np.asarray(alpha_spec, dtype=np.float64)

    flow_spec = data.get("flow", {"powers_of": np.pi / 4.0})
    if isinstance(flow_spec, dict):
        from .flow import subgroup_direction
        flow = subgroup_direction(float(flow_spec["powers_of"]), n)
    else:
        flow = FlowDirection(np.asarray(flow_spec, dtype=np.float64))

    xi = tuple(
        tuple(np.asarray(M, dtype=np.int64) for M in data["xi"][j - 2])
        for j in range(2, d + 1))
    eta_spec = data.get("eta")
    if eta_spec is None:
        eta = tuple(
            tuple(TrigPolynomial.zero(j - 1, n) for _ in range(n))
            for j in range(2, d + 1))
    else:
        eta = tuple(
            tuple(TrigPolynomial.from_records(j - 1, n, recs)
                  for recs in eta_spec[j - 2])
            for j in range(2, d + 1))
    return SystemConfig(n=n, d=d, alpha=alpha, xi=xi, eta=eta, flow=flow)


def config_digest(cfg: SystemConfig) -> str:
    payload = json.dumps(config_to_json_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()
