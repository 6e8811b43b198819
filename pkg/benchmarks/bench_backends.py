"""Compare the numba and pure-numpy kernels on the hot paths.

Times one map step (`advance`) and one polynomial evaluation (`eval_terms`)
over a batch of points, for each available backend. Run as:

    python benchmarks/bench_backends.py --points 65536 --steps 64
"""

import argparse
import time

import numpy as np

from ergodic_spectra import presets
from ergodic_spectra.kernels import compile_system, pack_polynomial
from ergodic_spectra.kernels import numpy_backend
from ergodic_spectra.torus import FrequencyVector, TrigPolynomial

try:
    from ergodic_spectra.kernels import numba_backend
except ImportError:
    numba_backend = None


def bench(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=2 ** 16)
    parser.add_argument("--steps", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = [("numpy", numpy_backend)]
    if numba_backend is not None:
        backends.append(("numba", numba_backend))
    else:
        print("numba unavailable; timing the numpy backend only")

    rng = np.random.default_rng(0)
    configs = [("anzai_perturbed", presets.anzai_config(perturbed=True)),
               ("depth3", presets.depth3_config())]

    print(f"{'config':<16} {'kernel':<10} {'backend':<8} {'best time':>12} {'speedup':>9}")
    for name, cfg in configs:
        cs = compile_system(cfg)
        terms = {FrequencyVector(rng.integers(-4, 5, size=(cfg.d, cfg.n))):
                 complex(rng.normal(), rng.normal()) for _ in range(8)}
        pp = pack_polynomial(TrigPolynomial(cfg.d, cfg.n, terms), cfg.d, cfg.n)
        base = {}
        for bname, mod in backends:
            pts = rng.random((args.points, cfg.d, cfg.n))

            def run_advance():
                x = pts.copy()
                for _ in range(args.steps):
                    mod.advance(x, cfg.d, cs.alpha, cs.mats, cs.eta_freq,
                                cs.eta_cre, cs.eta_cim, cs.eta_ptr)

            def run_eval():
                for _ in range(args.steps):
                    mod.eval_terms(pts, pp.freq, pp.cre, pp.cim)

            for kernel, fn in (("advance", run_advance), ("eval_terms", run_eval)):
                fn()  # warm-up (JIT compilation for numba)
                t = bench(fn, args.repeats)
                base.setdefault(kernel, t)
                speedup = base[kernel] / t
                print(f"{name:<16} {kernel:<10} {bname:<8} {t:>10.4f}s {speedup:>8.2f}x")


if __name__ == "__main__":
    main()
