"""Numba-compiled batch kernels; same signatures as numpy_backend."""

from __future__ import annotations

import numpy as np
from numba import njit, prange

TWO_PI = 2.0 * np.pi


@njit(cache=True, parallel=True)
def advance(x, depth, alpha, mats, eta_freq, eta_cre, eta_cim, eta_ptr):
    P, d, n = x.shape
    for p in prange(P):
        for j in range(depth, 1, -1):
            for k in range(n):
                phi = 0.0
                for i in range(j - 1):
                    for l in range(n):
                        phi += mats[j - 2, i, k, l] * x[p, i, l]
                for t in range(eta_ptr[j - 2, k, 0], eta_ptr[j - 2, k, 1]):
                    th = 0.0
                    for b in range(d):
                        for l in range(n):
                            th += eta_freq[t, b, l] * x[p, b, l]
                    th *= TWO_PI
                    phi += eta_cre[t] * np.cos(th) - eta_cim[t] * np.sin(th)
                v = (x[p, j - 1, k] + phi) % 1.0
                if v >= 1.0:
                    v = 0.0
                x[p, j - 1, k] = v
        for k in range(n):
            v = (x[p, 0, k] + alpha[k]) % 1.0
            if v >= 1.0:
                v = 0.0
            x[p, 0, k] = v


@njit(cache=True, parallel=True)
def eval_terms(x, freq, cre, cim):
    P, d, n = x.shape
    T = freq.shape[0]
    out_re = np.zeros(P)
    out_im = np.zeros(P)
    for p in prange(P):
        re = 0.0
        im = 0.0
        for t in range(T):
            th = 0.0
            for b in range(d):
                for l in range(n):
                    th += freq[t, b, l] * x[p, b, l]
            th *= TWO_PI
            ct = np.cos(th)
            st = np.sin(th)
            re += ct * cre[t] - st * cim[t]
            im += st * cre[t] + ct * cim[t]
        out_re[p] = re
        out_im[p] = im
    return out_re, out_im
