"""The translation flow on one torus factor and its generator.

A flow direction v defines the one-parameter translation x -> x + t*v on a
single block of (T^n)^d. The induced unitary acts diagonally on characters,
so the generator has an exact coefficientwise action on trigonometric
polynomials.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .torus import TWO_PI, TorusPoint, TrigPolynomial


def visibly_rational(x: float, max_denominator: int = 100, tol: float = 1e-12) -> bool:
    """True when x sits within tol of p/q for some q <= max_denominator."""
    for q in range(1, max_denominator + 1):
        if abs(x * q - round(x * q)) < tol:
            return True
    return False


@dataclass(frozen=True)
class FlowDirection:
    """Velocity vector of the translation subgroup in the truncation.

    Rational independence of the entries cannot be verified in floating
    point; it is a documented contract on the configuration. Visibly
    rational entries only trigger a warning.
    """

    v: np.ndarray  # shape (n,), float64

    def __post_init__(self):
        arr = np.asarray(self.v, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise ValueError("flow direction must have at least one coordinate")
        if np.any(arr == 0.0):
            raise ValueError("flow direction has a zero coordinate (not ergodic on that circle)")
        arr.setflags(write=False)
        object.__setattr__(self, "v", arr)

    @property
    def n(self) -> int:
        return self.v.size


def subgroup_direction(y: float, n: int) -> FlowDirection:
    """Direction (y, y^2, ..., y^n) of the subgroup t -> (y^k t mod 1).

    The powers of y are rationally independent when y is transcendental;
    y in {0, 1, -1} makes them degenerate and is rejected.
    """
    if y == 0.0 or abs(y) == 1.0:
        raise ValueError(f"subgroup parameter y={y} gives rationally dependent powers")
    if visibly_rational(y):
        warnings.warn(
            f"subgroup parameter y={y} looks rational; powers of y will not be "
            "rationally independent", stacklevel=2)
    return FlowDirection(np.array([y ** k for k in range(1, n + 1)]))


def _check_factor(factor: int, d: int):
    if not 1 <= factor <= d:
        raise ValueError(f"factor {factor} out of range 1..{d}")


def flow_apply(x: TorusPoint, t: float, v: FlowDirection, factor: int) -> TorusPoint:
    """Translate block `factor` (1-based) by t*v, other blocks unchanged."""
    _check_factor(factor, x.d)
    if v.n != x.n:
        raise ValueError(f"flow dimension {v.n} does not match point dimension {x.n}")
    blocks = np.array(x.blocks)
    blocks[factor - 1] += t * v.v
    return TorusPoint(blocks)


def translation_apply(P: TrigPolynomial, t: float, v: FlowDirection,
                      factor: int) -> TrigPolynomial:
    """Pullback of P under the time-t translation of block `factor`.

    Acts diagonally: the coefficient at m picks up exp(2*pi*i*t*<m_factor, v>).
    """
    _check_factor(factor, P.depth)
    if v.n != P.n:
        raise ValueError(f"flow dimension {v.n} does not match polynomial dimension {P.n}")
    return P.map_coefficients(
        lambda m, c: c * np.exp(2j * np.pi * t * float(m.blocks[factor - 1] @ v.v)))


def generator_apply(P: TrigPolynomial, v: FlowDirection, factor: int) -> TrigPolynomial:
    """Self-adjoint generator of the translation group, H = i d/dt (P o F_t)|_0.

    Exact diagonal action: coefficient(m) -> -2*pi*<m_factor, v> * coefficient(m).
    Finite Fourier support keeps every polynomial inside the domain.
    """
    _check_factor(factor, P.depth)
    if v.n != P.n:
        raise ValueError(f"flow dimension {v.n} does not match polynomial dimension {P.n}")
    return P.map_coefficients(
        lambda m, c: -TWO_PI * float(m.blocks[factor - 1] @ v.v) * c)
