"""Birkhoff, mixing and spectral diagnostics for the skew product.

Correlation sequences c_N = <phi, psi o T^N> are estimated by quadrature in
one orbit pass per sample point. For affine systems (no perturbation) the
Koopman operator maps characters to characters, so an exact symbolic oracle
is available and used to validate the quadrature path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dynamics import SystemConfig, config_digest
from .sampling import Sampler, group_statistics
from .torus import TorusPoint, TrigPolynomial


def _eval_on_batch(P: TrigPolynomial, d: int, n: int, points: np.ndarray) -> np.ndarray:
    return kernels.eval_packed(kernels.pack_polynomial(P, d, n), points)


def require_mixing_subspace(P: TrigPolynomial) -> TrigPolynomial:
    """Check that P lies in the orthocomplement of the first-factor functions.

    Every frequency must have a nonzero block outside factor 1; this encodes
    the mixing subspace exactly on the polynomial class.
    """
    for m, _ in P.terms():
        if not m.blocks[1:].any():
            raise ValueError(
                f"frequency {m.blocks.tolist()} depends only on factor 1; "
                "the vector is not orthogonal to the first-factor subspace")
    return P


@dataclass(frozen=True)
class CorrelationSeries:
    """Estimated correlations c_0..c_Nmax with per-entry standard errors."""

    values: np.ndarray   # complex, length Nmax + 1
    stderr: np.ndarray   # real, same length
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def nmax(self) -> int:
        return len(self.values) - 1


def correlation_series(cfg: SystemConfig, phi: TrigPolynomial, psi: TrigPolynomial,
                       Nmax: int, sampler: Sampler) -> CorrelationSeries:
    """c_N = quadrature mean of conj(phi(x)) * psi(T^N x), N = 0..Nmax."""
    if Nmax < 0:
        raise ValueError("Nmax must be >= 0")
    if sampler.dims != (cfg.d, cfg.n):
        raise ValueError("sampler dimensions do not match the configuration")
    cs = kernels.compile_system(cfg)
    psi_packed = kernels.pack_polynomial(psi, cfg.d, cfg.n)
    x = sampler.points()
    phi_conj = np.conj(_eval_on_batch(phi, cfg.d, cfg.n, x))

    values = np.empty(Nmax + 1, dtype=np.complex128)
    stderr = np.empty(Nmax + 1)
    for N in range(Nmax + 1):
        vals = phi_conj * kernels.eval_packed(psi_packed, x)
        values[N], stderr[N] = group_statistics(vals, sampler)
        if N < Nmax:
            kernels.advance_system(cs, x)
    meta = {
        "config_digest": config_digest(cfg),
        "sampler": sampler.record(),
        "phi": phi.to_records(),
        "psi": psi.to_records(),
        "backend": kernels.BACKEND,
    }
    return CorrelationSeries(values=values, stderr=stderr, meta=meta)


def affine_oracle_correlation(cfg: SystemConfig, phi: TrigPolynomial,
                              psi: TrigPolynomial, N: int) -> complex:
    """Exact c_N for affine systems and single-character vectors.

    T acts on characters by an integer affine map, so psi o T^N is again a
    single character with an accumulated rotation phase; the inner product
    is that phase when the frequencies match and 0 otherwise.
    """
    return affine_oracle_series(cfg, phi, psi, N)[N]


def affine_oracle_series(cfg: SystemConfig, phi: TrigPolynomial,
                         psi: TrigPolynomial, Nmax: int) -> np.ndarray:
    if not cfg.is_affine():
        raise ValueError("oracle valid only for affine systems (all eta empty)")
    if phi.support_size != 1 or psi.support_size != 1:
        raise ValueError("oracle requires single-frequency vectors")
    (m_phi, a), = phi.terms()
    (m_psi, b), = psi.terms()

    freq = m_psi.blocks.astype(np.int64).copy()   # frequency of psi o T^ell
    mats = [[M for M in cfg.xi_mats(j)] for j in range(2, cfg.d + 1)]
    phase_exp = 0.0                               # rotation phase mod 1
    out = np.empty(Nmax + 1, dtype=np.complex128)
    for N in range(Nmax + 1):
        if np.array_equal(freq, m_phi.blocks):
            out[N] = np.conj(a) * b * np.exp(2j * np.pi * phase_exp)
        else:
            out[N] = 0.0
        # push the character through one application of T
        phase_exp = (phase_exp + float(freq[0] @ cfg.alpha)) % 1.0
        new = freq.copy()
        for j in range(2, cfg.d + 1):
            for i in range(1, j):
                new[i - 1] += mats[j - 2][i - 1].T @ freq[j - 1]
        freq = new
    return out


def birkhoff_partial(cfg: SystemConfig, f: TrigPolynomial, x0: TorusPoint,
                     checkpoints) -> np.ndarray:
    """Partial Birkhoff averages (1/N) sum_{l<N} f(T^l x0) at each checkpoint."""
    checkpoints = [int(N) for N in checkpoints]
    if any(N < 1 for N in checkpoints) or sorted(checkpoints) != checkpoints:
        raise ValueError("checkpoints must be ascending and >= 1")
    cs = kernels.compile_system(cfg)
    packed = kernels.pack_polynomial(f, cfg.d, cfg.n)
    x = x0.blocks[None, :, :].copy()
    acc = 0.0 + 0.0j
    out = np.empty(len(checkpoints), dtype=np.complex128)
    marks = {N: i for i, N in enumerate(checkpoints)}
    for step in range(1, checkpoints[-1] + 1):
        acc += kernels.eval_packed(packed, x)[0]
        if step in marks:
            out[marks[step]] = acc / step
        if step < checkpoints[-1]:
            kernels.advance_system(cs, x)
    return out


def ergodicity_gaps(cfg: SystemConfig, f: TrigPolynomial, starts: np.ndarray,
                    checkpoints) -> np.ndarray:
    """Max over starting points of |A_N f - integral(f)| at each checkpoint."""
    checkpoints = [int(N) for N in checkpoints]
    if any(N < 1 for N in checkpoints) or sorted(checkpoints) != checkpoints:
        raise ValueError("checkpoints must be ascending and >= 1")
    starts = np.asarray(starts, dtype=np.float64)
    if starts.size == 0:
        raise ValueError("starts must be nonempty")
    cs = kernels.compile_system(cfg)
    packed = kernels.pack_polynomial(f, cfg.d, cfg.n)
    target = f.integral()
    x = np.array(starts)
    acc = np.zeros(x.shape[0], dtype=np.complex128)
    out = np.empty(len(checkpoints))
    marks = {N: i for i, N in enumerate(checkpoints)}
    for step in range(1, checkpoints[-1] + 1):
        acc += kernels.eval_packed(packed, x)
        if step in marks:
            out[marks[step]] = float(np.max(np.abs(acc / step - target)))
        if step < checkpoints[-1]:
            kernels.advance_system(cs, x)
    return out


def ergodicity_gap(cfg: SystemConfig, f: TrigPolynomial, starts: np.ndarray,
                   N: int) -> float:
    return float(ergodicity_gaps(cfg, f, starts, [N])[0])


def wiener_statistic(series: CorrelationSeries, M: int) -> float:
    """Cesaro mean (1/M) sum_{N=1}^{M} |c_N|^2; zero iff no spectral atoms."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if M > series.nmax:
        raise ValueError(f"M={M} exceeds available lags Nmax={series.nmax}")
    return float(np.mean(np.abs(series.values[1:M + 1]) ** 2))


@dataclass(frozen=True)
class SpectralDensityEstimate:
    grid: np.ndarray        # angles in [0, 2*pi)
    density: np.ndarray     # real, Fejer-smoothed spectral density
    bandwidth: int
    flatness: float         # max |density - mean(density)|
    atom_score: float       # Wiener statistic at the same bandwidth
    stderr: float           # propagated quadrature error, uniform in theta
    c0: complex


def spectral_density(series: CorrelationSeries, grid_size: int,
                     bandwidth: int | None = None) -> SpectralDensityEstimate:
    """Fejer-weighted density (1/2pi) sum_{|N|<=M} (1 - |N|/M) c_N e^{-iN theta}."""
    if grid_size < 8:
        raise ValueError("grid_size must be >= 8")
    M = series.nmax // 2 if bandwidth is None else int(bandwidth)
    if not 1 <= M <= series.nmax:
        raise ValueError(f"bandwidth {M} out of range 1..{series.nmax}")
    theta = np.arange(grid_size) * (2.0 * np.pi / grid_size)
    lags = np.arange(1, M + 1)
    w = 1.0 - lags / M
    cN = series.values[1:M + 1]
    phases = np.exp(-1j * np.outer(lags, theta))
    density = (series.values[0].real + 2.0 * np.real(w @ (cN[:, None] * phases))) / (2.0 * np.pi)
    flatness = float(np.max(np.abs(density - np.mean(density))))
    stderr = float(np.sqrt(series.stderr[0] ** 2
                           + 2.0 * np.sum((w * series.stderr[1:M + 1]) ** 2))
                   / (2.0 * np.pi))
    return SpectralDensityEstimate(
        grid=theta, density=density, bandwidth=M, flatness=flatness,
        atom_score=wiener_statistic(series, M), stderr=stderr,
        c0=complex(series.values[0]))
