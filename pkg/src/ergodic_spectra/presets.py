"""Ready-made configurations and observables used by the CLI and tests."""

from __future__ import annotations

import numpy as np

from .dynamics import SystemConfig
from .flow import FlowDirection, subgroup_direction
from .sampling import first_primes
from .torus import FrequencyVector, TrigPolynomial

SQRT2 = float(np.sqrt(2.0))


def sqrt_prime_alpha(n: int) -> np.ndarray:
    """alpha_k = frac(sqrt(p_k)); rationally independent together with 1."""
    return np.sqrt(first_primes(n)) % 1.0


def identity_xi(n: int, d: int) -> tuple:
    """Couplings M_{j,i} = identity for i = j-1, zero otherwise."""
    eye = np.eye(n, dtype=np.int64)
    zero = np.zeros((n, n), dtype=np.int64)
    return tuple(
        tuple(zero if i < j - 1 else eye for i in range(1, j))
        for j in range(2, d + 1))


def zero_eta(n: int, d: int) -> tuple:
    return tuple(
        tuple(TrigPolynomial.zero(j - 1, n) for _ in range(n))
        for j in range(2, d + 1))


def anzai_config(perturbed: bool = False, amplitude: float = 0.1,
                 flow: FlowDirection | None = None) -> SystemConfig:
    """The n=1, d=2 skew product (x, y) -> (x + sqrt(2) mod 1, y + x [+ eta]).

    With `perturbed` the second factor picks up amplitude*cos(2*pi*x).
    The default flow direction is (sqrt(2),), matching the commutator
    worked examples.
    """
    eta = zero_eta(1, 2)
    if perturbed:
        eta = ((TrigPolynomial.cosine(1, 1, 1, 1, amplitude),),)
    return SystemConfig(
        n=1, d=2,
        alpha=sqrt_prime_alpha(1),
        xi=identity_xi(1, 2),
        eta=eta,
        flow=flow if flow is not None else FlowDirection(np.array([SQRT2])),
    )


def depth3_config(n: int = 1, amplitude: float = 0.05) -> SystemConfig:
    """A d=3 system with mixed integer couplings and perturbations on both levels."""
    eye = np.eye(n, dtype=np.int64)
    xi = (
        (eye,),
        (eye, 2 * eye),
    )
    eta = (
        (TrigPolynomial.cosine(1, n, 1, 1, amplitude),) + tuple(
            TrigPolynomial.zero(1, n) for _ in range(n - 1)),
        (TrigPolynomial.cosine(2, n, 2, 1, amplitude),) + tuple(
            TrigPolynomial.zero(2, n) for _ in range(n - 1)),
    )
    return SystemConfig(
        n=n, d=3,
        alpha=sqrt_prime_alpha(n),
        xi=xi,
        eta=eta,
        flow=subgroup_direction(np.pi / 4.0, n),
    )


def character_vector(cfg: SystemConfig, blocks) -> TrigPolynomial:
    """Single character from a (d, n) nested frequency list."""
    m = FrequencyVector(np.asarray(blocks, dtype=np.int64).reshape(cfg.d, cfg.n))
    return TrigPolynomial.character(m)


def mixing_vector(cfg: SystemConfig) -> TrigPolynomial:
    """1 (x) e_1: trivial on factor 1, first unit frequency on factor 2."""
    m = np.zeros((cfg.d, cfg.n), dtype=np.int64)
    m[1, 0] = 1
    return character_vector(cfg, m)


def h1_control_vector(cfg: SystemConfig) -> TrigPolynomial:
    """e_1 (x) 1: lives in the first-factor subspace, where nothing mixes."""
    m = np.zeros((cfg.d, cfg.n), dtype=np.int64)
    m[0, 0] = 1
    return character_vector(cfg, m)


def default_observables(cfg: SystemConfig) -> list[tuple[str, TrigPolynomial]]:
    """Five zero-mean observables used by the ergodicity diagnostics."""
    d, n = cfg.d, cfg.n

    def char(assign) -> TrigPolynomial:
        m = np.zeros((d, n), dtype=np.int64)
        for (b, k), v in assign.items():
            m[b - 1, k - 1] = v
        return character_vector(cfg, m)

    rotation = char({(1, 1): 1})
    second = char({(2, 1): 1})
    cross = char({(1, 1): 1, (2, 1): -1})
    cos1 = TrigPolynomial.cosine(d, n, 1, 1, 1.0)
    double = char({(1, 1): 2}) + char({(2, 1): 2}).scale(0.5)
    return [
        ("rotation", rotation),
        ("second_factor", second),
        ("cross", cross),
        ("cosine", cos1),
        ("double", double),
    ]
