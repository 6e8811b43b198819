"""Backend selection for the batch kernels.

ERGODIC_SPECTRA_BACKEND=numpy forces the pure-numpy path;
ERGODIC_SPECTRA_BACKEND=numba requires numba and fails loudly if missing.
Default: numba when importable, numpy otherwise.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from .packing import CompiledSystem, PackedPolynomial, compile_system, pack_polynomial
from . import numpy_backend

_requested = os.environ.get("ERGODIC_SPECTRA_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"ERGODIC_SPECTRA_BACKEND={_requested!r}: expected 'numba' or 'numpy'")

if _requested == "numpy":
    BACKEND = "numpy"
    _impl = numpy_backend
else:
    # the default TBB layer probes an incompatible system TBB on some hosts
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        from . import numba_backend as _impl
        BACKEND = "numba"
    except ImportError as exc:
        if _requested == "numba":
            raise RuntimeError("numba backend requested but numba is unavailable") from exc
        warnings.warn("numba unavailable, falling back to pure-numpy kernels")
        BACKEND = "numpy"
        _impl = numpy_backend

advance = _impl.advance
eval_terms = _impl.eval_terms


def set_threads(count: int):
    """Cap numba's thread pool; a no-op on the numpy backend."""
    if BACKEND == "numba" and count >= 1:
        import numba
        numba.set_num_threads(min(count, numba.config.NUMBA_NUM_THREADS))


def advance_system(cs: CompiledSystem, x: np.ndarray, depth: int | None = None):
    """One step of T_depth applied in place to the batch x of shape (P, d, n)."""
    advance(x, cs.d if depth is None else depth, cs.alpha, cs.mats,
            cs.eta_freq, cs.eta_cre, cs.eta_cim, cs.eta_ptr)


def eval_packed(pp: PackedPolynomial, x: np.ndarray) -> np.ndarray:
    """Evaluate a packed polynomial on the batch x; returns complex (P,)."""
    re, im = eval_terms(x, pp.freq, pp.cre, pp.cim)
    return re + 1j * im


__all__ = [
    "BACKEND", "CompiledSystem", "PackedPolynomial", "advance", "advance_system",
    "compile_system", "eval_packed", "eval_terms", "pack_polynomial", "set_threads",
]
