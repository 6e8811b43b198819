"""Array packing of configs and polynomials for the batch kernels.

The hot loops (orbit advancement, polynomial evaluation over many sample
points) operate on flat float64/int64 arrays so the same code runs under
numba and pure numpy. Frequencies of polynomials on the first j-1 factors
are zero-padded to the full (d, n) block layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import SystemConfig
from ..torus import TrigPolynomial


@dataclass(frozen=True)
class PackedPolynomial:
    freq: np.ndarray    # (T, d, n) float64, integer-valued
    cre: np.ndarray     # (T,)
    cim: np.ndarray     # (T,)


@dataclass(frozen=True)
class CompiledSystem:
    n: int
    d: int
    alpha: np.ndarray     # (n,)
    mats: np.ndarray      # (d-1, d-1, n, n) float64; row j-2, col i-1 = M_{j,i}
    eta_freq: np.ndarray  # (T, d, n) float64
    eta_cre: np.ndarray   # (T,)
    eta_cim: np.ndarray   # (T,)
    eta_ptr: np.ndarray   # (d-1, n, 2) int64 term ranges per (target block, coord)


def pack_polynomial(P: TrigPolynomial, d: int, n: int) -> PackedPolynomial:
    if P.n != n or P.depth > d:
        raise ValueError(f"polynomial on ({P.depth},{P.n}) does not embed in ({d},{n})")
    T = P.support_size
    freq = np.zeros((T, d, n))
    cre = np.zeros(T)
    cim = np.zeros(T)
    for t, (f, c) in enumerate(P.terms()):
        freq[t, : P.depth] = f.blocks
        cre[t] = c.real
        cim[t] = c.imag
    return PackedPolynomial(freq, cre, cim)


def compile_system(cfg: SystemConfig) -> CompiledSystem:
    d, n = cfg.d, cfg.n
    mats = np.zeros((d - 1, d - 1, n, n))
    for j in range(2, d + 1):
        for i, M in enumerate(cfg.xi_mats(j), start=1):
            mats[j - 2, i - 1] = M
    freqs, cres, cims = [], [], []
    ptr = np.zeros((d - 1, n, 2), dtype=np.int64)
    pos = 0
    for j in range(2, d + 1):
        for k, P in enumerate(cfg.eta_polys(j)):
            packed = pack_polynomial(P, d, n)
            ptr[j - 2, k] = (pos, pos + packed.freq.shape[0])
            pos += packed.freq.shape[0]
            freqs.append(packed.freq)
            cres.append(packed.cre)
            cims.append(packed.cim)
    if freqs:
        eta_freq = np.concatenate(freqs)
        eta_cre = np.concatenate(cres)
        eta_cim = np.concatenate(cims)
    else:
        eta_freq = np.zeros((0, d, n))
        eta_cre = np.zeros(0)
        eta_cim = np.zeros(0)
    return CompiledSystem(n=n, d=d, alpha=np.array(cfg.alpha), mats=mats,
                          eta_freq=eta_freq, eta_cre=eta_cre, eta_cim=eta_cim,
                          eta_ptr=ptr)
