"""The commutator field of the twisted Koopman operator and its diagnostics.

For a factor index j and a nontrivial character chi on one torus, the
commutator of the flow generator with the twisted operator is
multiplication by a real field: a constant coming from the homomorphism
part plus a mean-zero oscillation coming from the perturbation. Everything
here is computed exactly in coefficient space; finite differences along the
flow serve only as independent verification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import SystemConfig, as_chi
from .flow import generator_apply
from .sampling import Sampler
from .torus import TWO_PI, TorusPoint, TrigPolynomial

DEGENERACY_TOL = 1e-9


def _m_last(cfg: SystemConfig, j: int) -> np.ndarray:
    return cfg.xi_mats(j)[j - 2]


def _require_factor(cfg: SystemConfig, j: int):
    if not 2 <= j <= cfg.d:
        raise ValueError(f"factor index {j} out of range 2..{cfg.d}")


def xi_chi(cfg: SystemConfig, j: int, chi) -> complex:
    """Derivative of the homomorphism character along the flow: 2*pi*i*<M^T chi, v>.

    Nonzero under the rational-independence contract on the flow direction;
    a near-zero value means a degenerate character/flow pairing and is an error.
    """
    _require_factor(cfg, j)
    chi_arr = as_chi(chi, cfg.n)
    if not chi_arr.any():
        raise ValueError("trivial character is excluded")
    value = TWO_PI * float((_m_last(cfg, j).T @ chi_arr) @ cfg.flow.v)
    if abs(value) <= DEGENERACY_TOL:
        raise ArithmeticError(
            f"degenerate character/flow pairing: |xi^(chi)| = {abs(value)}")
    return 1j * value


@dataclass(frozen=True)
class CommutatorField:
    """Real multiplication field g = constant + oscillation on (T^n)^{j-1}."""

    j: int
    chi: np.ndarray
    constant: float               # i*xi^(chi) as a real number
    oscillation: TrigPolynomial   # mean-zero, real-valued

    def as_polynomial(self) -> TrigPolynomial:
        const = TrigPolynomial.constant(self.oscillation.depth, self.oscillation.n,
                                        self.constant)
        return const + self.oscillation

    def eval(self, x: TorusPoint) -> float:
        sub = TorusPoint(x.blocks[: self.j - 1]) if x.d > self.j - 1 else x
        return self.constant + self.oscillation.eval(sub).real

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on a batch (P, d, n); only the first j-1 blocks are read."""
        packed = kernels.pack_polynomial(self.oscillation, points.shape[1],
                                         points.shape[2])
        return self.constant + kernels.eval_packed(packed, points).real


def g_function(cfg: SystemConfig, j: int, chi) -> CommutatorField:
    """Assemble the commutator field exactly in coefficient space."""
    _require_factor(cfg, j)
    chi_arr = as_chi(chi, cfg.n)
    constant = float((1j * xi_chi(cfg, j, chi_arr)).real)  # i*xi^(chi), a real number
    osc = TrigPolynomial.zero(j - 1, cfg.n)
    for k, poly in enumerate(cfg.eta_polys(j)):
        if chi_arr[k] and poly.support_size:
            osc = osc + generator_apply(poly, cfg.flow, j - 1).scale(
                2j * np.pi * float(chi_arr[k]))
    if not osc.is_real():
        raise ArithmeticError("commutator field oscillation is not real-valued")
    if abs(osc.integral()) > 1e-14:
        raise ArithmeticError("commutator field oscillation is not mean-zero")
    return CommutatorField(j=j, chi=chi_arr, constant=constant, oscillation=osc)


def _orbit_of_origin(cfg: SystemConfig, depth: int, length: int) -> np.ndarray:
    cs = kernels.compile_system(cfg)
    x = np.zeros((1, cfg.d, cfg.n))
    out = np.empty((length, cfg.d, cfg.n))
    for i in range(length):
        out[i] = x[0]
        kernels.advance_system(cs, x, depth=depth)
    return out


def default_sample_points(cfg: SystemConfig, j: int, lattice_per_factor: int = 4096,
                          orbit_length: int = 128) -> np.ndarray:
    """Rank-1 lattice over the active factors plus the orbit of the origin."""
    count = lattice_per_factor * (j - 1)
    sampler = Sampler(kind="rank1_lattice", seed=0, count=count, dims=(j - 1, cfg.n))
    lattice = sampler.points()
    full = np.zeros((count, cfg.d, cfg.n))
    full[:, : j - 1] = lattice
    return np.concatenate([full, _orbit_of_origin(cfg, j - 1, orbit_length)])


def g_birkhoff_checkpoints(cfg: SystemConfig, j: int, chi, checkpoints,
                           points: np.ndarray) -> np.ndarray:
    """Birkhoff averages of the field along T_{j-1} orbits of a point batch.

    Returns shape (len(checkpoints), P): the average over the first N steps
    at each requested N, computed in a single orbit pass.
    """
    checkpoints = [int(N) for N in checkpoints]
    if any(N < 1 for N in checkpoints) or sorted(checkpoints) != checkpoints:
        raise ValueError("checkpoints must be ascending and >= 1")
    field = g_function(cfg, j, chi)
    cs = kernels.compile_system(cfg)
    packed = kernels.pack_polynomial(field.as_polynomial(), cfg.d, cfg.n)
    x = np.array(points, dtype=np.float64)
    acc = np.zeros(x.shape[0])
    out = np.empty((len(checkpoints), x.shape[0]))
    marks = {N: i for i, N in enumerate(checkpoints)}
    for step in range(1, checkpoints[-1] + 1):
        re, _ = kernels.eval_terms(x, packed.freq, packed.cre, packed.cim)
        acc += re
        if step in marks:
            out[marks[step]] = acc / step
        if step < checkpoints[-1]:
            kernels.advance_system(cs, x, depth=j - 1)
    return out


def g_birkhoff_eval(cfg: SystemConfig, j: int, chi, N: int, x: TorusPoint) -> float:
    if N < 1:
        raise ValueError("N must be >= 1")
    pts = x.blocks[None, :, :]
    return float(g_birkhoff_checkpoints(cfg, j, chi, [N], pts)[0, 0])


@dataclass(frozen=True)
class MourreBound:
    a: float
    witness: TorusPoint
    N: int


def mourre_bound(cfg: SystemConfig, j: int, chi, N: int,
                 samples: np.ndarray | None = None) -> MourreBound:
    """Sampled strict lower bound min |g^(N)| with its minimizing point."""
    if samples is None:
        samples = default_sample_points(cfg, j)
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("empty sample set")
    values = g_birkhoff_checkpoints(cfg, j, chi, [N], samples)[0]
    idx = int(np.argmin(np.abs(values)))
    return MourreBound(a=float(np.abs(values[idx])),
                       witness=TorusPoint(samples[idx]), N=int(N))


def adaptive_mourre_N(cfg: SystemConfig, j: int, chi,
                      samples: np.ndarray | None = None, max_power: int = 5) -> int:
    """Smallest power of 10 at which the sampled field deviates from its
    constant limit by at most half the limit's magnitude."""
    if samples is None:
        samples = default_sample_points(cfg, j)
    limit = g_function(cfg, j, chi).constant
    checkpoints = [10 ** p for p in range(max_power + 1)]
    averages = g_birkhoff_checkpoints(cfg, j, chi, checkpoints, samples)
    for N, row in zip(checkpoints, averages):
        if np.max(np.abs(row - limit)) <= 0.5 * abs(limit):
            return N
    raise ArithmeticError(
        f"no N <= 10^{max_power} reaches the 0.5*|i xi^(chi)| deviation target")


@dataclass(frozen=True)
class CommutatorCheck:
    t_schedule: tuple
    residuals: tuple          # max residual per t, same order as t_schedule
    extrapolated: float       # residual of the Neville limit t -> 0


def _neville_to_zero(ts: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Polynomial extrapolation of values(t) to t=0; values shape (len(ts), P)."""
    table = [v.copy() for v in values]
    k = len(ts)
    for level in range(1, k):
        for i in range(k - level):
            t0, t1 = ts[i], ts[i + level]
            table[i] = (t0 * table[i + 1] - t1 * table[i]) / (t0 - t1)
    return table[0]


def verify_commutator(cfg: SystemConfig, j: int, chi, f: TrigPolynomial | None = None,
                      points: np.ndarray | None = None,
                      t_schedule=(1e-2, 1e-3, 1e-4, 1e-5)) -> CommutatorCheck:
    """Finite-difference check of the commutator identity.

    For each t the difference quotient of the cocycle phase is compared with
    the exact field g; the max residual (weighted by |f(T x)|) must decay
    first-order in t. The Neville extrapolation through the four smallest
    t values estimates the t->0 residual.
    """
    _require_factor(cfg, j)
    ts = tuple(float(t) for t in t_schedule)
    if any(not 0.0 < t <= 0.1 for t in ts) or list(ts) != sorted(ts, reverse=True):
        raise ValueError("t_schedule must be strictly decreasing within (0, 0.1]")
    chi_arr = as_chi(chi, cfg.n)
    field = g_function(cfg, j, chi_arr)
    if points is None:
        points = default_sample_points(cfg, j, lattice_per_factor=256, orbit_length=32)
    points = np.asarray(points, dtype=np.float64)
    P = points.shape[0]

    cs = kernels.compile_system(cfg)
    eta_packed = [kernels.pack_polynomial(poly, cfg.d, cfg.n)
                  for poly in cfg.eta_polys(j)]
    g_vals = field.eval_batch(points)

    if f is None:
        weights = np.ones(P)
    else:
        fx = np.array(points)
        kernels.advance_system(cs, fx, depth=j - 1)
        weights = np.abs(kernels.eval_packed(kernels.pack_polynomial(f, cfg.d, cfg.n), fx))

    def eta_vector(pts: np.ndarray) -> np.ndarray:
        out = np.zeros((P, cfg.n))
        for k, packed in enumerate(eta_packed):
            if packed.freq.shape[0]:
                out[:, k] = kernels.eval_packed(packed, pts).real
        return out

    eta0 = eta_vector(points)
    Mv = _m_last(cfg, j).astype(np.float64) @ cfg.flow.v

    quotients = np.empty((len(ts), P), dtype=np.complex128)
    residuals = []
    for row, t in enumerate(ts):
        shifted = np.array(points)
        shifted[:, j - 2] = (shifted[:, j - 2] + t * cfg.flow.v) % 1.0
        delta = t * Mv + eta_vector(shifted) - eta0
        theta = TWO_PI * (delta @ chi_arr.astype(np.float64))
        # i*(e^{i theta} - 1)/t with the cancellation-safe cos form
        q = (-np.sin(theta) - 2j * np.sin(theta / 2.0) ** 2) / t
        quotients[row] = q
        residuals.append(float(np.max(np.abs(q - g_vals) * weights)))

    tail = min(4, len(ts))
    extrap = _neville_to_zero(np.array(ts[-tail:]), quotients[-tail:])
    extrapolated = float(np.max(np.abs(extrap - g_vals) * weights))
    return CommutatorCheck(t_schedule=ts, residuals=tuple(residuals),
                           extrapolated=extrapolated)


@dataclass(frozen=True)
class DiniProfile:
    t_grid: tuple
    moduli: tuple             # sampled sup |(H eta_k) o F_t - H eta_k| per t
    integral: float           # estimate of the Dini integral over (0, 1]
    lipschitz: float          # analytic bound L: modulus(t) <= L*t


def dini_profile(cfg: SystemConfig, j: int, k: int, t_grid) -> DiniProfile:
    """Dini modulus of the perturbation derivative along the flow.

    The shifted field differs from the original by exact coefficient phase
    factors, so each modulus is the sampled sup of a known polynomial; the
    integral of modulus(t)/t over (0, t_min] is bounded using the Lipschitz
    behaviour of the modulus near zero.
    """
    _require_factor(cfg, j)
    if not 1 <= k <= cfg.n:
        raise ValueError(f"coordinate {k} out of range 1..{cfg.n}")
    ts = np.asarray(sorted(float(t) for t in t_grid))
    if ts.size == 0 or ts[0] <= 0.0:
        raise ValueError("t_grid must be positive")
    h = generator_apply(cfg.eta_polys(j)[k - 1], cfg.flow, j - 1)

    lipschitz = 0.0
    for m, c in h.terms():
        lipschitz += abs(c) * TWO_PI * abs(float(m.blocks[j - 2] @ cfg.flow.v))

    count = 2048 * (j - 1)
    sampler = Sampler(kind="rank1_lattice", seed=0, count=count, dims=(j - 1, cfg.n))
    pts = sampler.points()

    moduli = []
    for t in ts:
        diff = h.map_coefficients(
            lambda m, c: c * (np.exp(2j * np.pi * t * float(m.blocks[j - 2] @ cfg.flow.v)) - 1.0))
        packed = kernels.pack_polynomial(diff, j - 1, cfg.n)
        vals = kernels.eval_packed(packed, pts)
        moduli.append(float(np.max(np.abs(vals))) if packed.freq.shape[0] else 0.0)
    moduli_arr = np.asarray(moduli)

    integrand = moduli_arr / ts
    integral = float(np.trapezoid(integrand, ts)) if ts.size > 1 else 0.0
    # modulus(t) <= L*t near 0, so the (0, t_min] piece is at most modulus(t_min)
    integral += float(moduli_arr[0])
    return DiniProfile(t_grid=tuple(ts), moduli=tuple(moduli_arr),
                       integral=integral, lipschitz=float(lipschitz))
