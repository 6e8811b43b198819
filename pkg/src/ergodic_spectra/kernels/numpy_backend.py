"""Pure-numpy batch kernels, vectorized over sample points."""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def _mod1_inplace(a: np.ndarray):
    np.mod(a, 1.0, out=a)
    a[a >= 1.0] = 0.0


def advance(x, depth, alpha, mats, eta_freq, eta_cre, eta_cim, eta_ptr):
    """Advance the batch x (P, d, n) by one step of T_depth, in place."""
    n = x.shape[2]
    for j in range(depth, 1, -1):
        phi = np.einsum("ikl,pil->pk", mats[j - 2, : j - 1], x[:, : j - 1])
        for k in range(n):
            s, e = eta_ptr[j - 2, k]
            if e > s:
                theta = TWO_PI * np.tensordot(x, eta_freq[s:e], axes=([1, 2], [1, 2]))
                phi[:, k] += np.cos(theta) @ eta_cre[s:e] - np.sin(theta) @ eta_cim[s:e]
        x[:, j - 1] += phi
        _mod1_inplace(x[:, j - 1])
    x[:, 0] += alpha
    _mod1_inplace(x[:, 0])


def eval_terms(x, freq, cre, cim):
    """Evaluate sum_t c_t exp(2*pi*i freq_t . x) at each point; returns (re, im)."""
    P = x.shape[0]
    if freq.shape[0] == 0:
        return np.zeros(P), np.zeros(P)
    theta = TWO_PI * np.tensordot(x, freq, axes=([1, 2], [1, 2]))
    ct, st = np.cos(theta), np.sin(theta)
    return ct @ cre - st @ cim, st @ cre + ct @ cim
