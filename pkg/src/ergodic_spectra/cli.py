"""Experiment runner: load a config, run a named experiment, write CSV + manifest.

Exit codes: 0 success, 2 config/validation error, 3 numerical-contract
violation (e.g. a nonpositive sampled Mourre bound). Identical inputs
produce byte-identical CSV outputs; the manifest is written before any
data file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, commutator, dynamics, kernels, presets
from .sampling import Sampler
from .torus import FrequencyVector, TrigPolynomial

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3


class ConfigError(Exception):
    pass


class ContractViolation(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list[str], rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                _fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def load_config(path: str) -> dynamics.SystemConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return dynamics.config_from_json_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc


def parse_point(spec: str, d: int, n: int) -> np.ndarray:
    """Parse 'a,b;c,d' into a (d, n) coordinate array (blocks split by ';')."""
    blocks = [[float(v) for v in blk.split(",")] for blk in spec.split(";")]
    arr = np.asarray(blocks)
    if arr.shape != (d, n):
        raise ConfigError(f"point {spec!r} has shape {arr.shape}, expected ({d},{n})")
    return arr


def parse_vector_spec(spec: str, cfg) -> TrigPolynomial:
    """A character as 'a,b;c,d' frequency blocks, or a JSON term-record list."""
    spec = spec.strip()
    if spec.startswith("["):
        return TrigPolynomial.from_records(cfg.d, cfg.n, json.loads(spec))
    arr = np.asarray(
        [[int(v) for v in blk.split(",")] for blk in spec.split(";")], dtype=np.int64)
    if arr.shape != (cfg.d, cfg.n):
        raise ConfigError(f"character {spec!r} has shape {arr.shape}, expected ({cfg.d},{cfg.n})")
    return TrigPolynomial.character(FrequencyVector(arr))


def parse_chi(spec: str, n: int) -> np.ndarray:
    arr = np.asarray([int(v) for v in spec.split(",")], dtype=np.int64)
    if arr.size != n:
        raise ConfigError(f"chi {spec!r} has {arr.size} entries, expected {n}")
    return arr


def parse_floats(spec: str) -> list[float]:
    return [float(v) for v in spec.split(",")]


def parse_ints(spec: str) -> list[int]:
    return [int(v) for v in spec.split(",")]


def make_sampler(args, cfg) -> Sampler:
    return Sampler(kind=args.sampler, seed=args.seed, count=args.samples,
                   dims=(cfg.d, cfg.n))


def write_manifest(out_dir: Path, args, cfg, extra: dict | None = None):
    manifest = {
        "tool": "ergodic-spectra",
        "version": __version__,
        "experiment": args.experiment,
        "config_digest": dynamics.config_digest(cfg),
        "seed": args.seed,
        "samples": args.samples,
        "threads": args.threads,
        "backend": kernels.BACKEND,
        "params": extra or {},
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


# -- experiments -------------------------------------------------------------


def run_validate(args, cfg, out_dir: Path):
    write_manifest(out_dir, args, cfg)
    return EXIT_OK


def run_orbit(args, cfg, out_dir: Path):
    if args.N > dynamics.ORBIT_LENGTH_GUIDANCE:
        print(f"warning: orbit length {args.N} exceeds the double-precision "
              f"guidance {dynamics.ORBIT_LENGTH_GUIDANCE}", file=sys.stderr)
    x0 = dynamics.TorusPoint(parse_point(args.x0, cfg.d, cfg.n)) if args.x0 \
        else dynamics.TorusPoint(np.zeros((cfg.d, cfg.n)))
    write_manifest(out_dir, args, cfg, {"N": args.N, "direction": args.direction})
    header = ["step"] + [f"x_{b}_{k}" for b in range(1, cfg.d + 1)
                         for k in range(1, cfg.n + 1)]
    rows = ((step, *map(float, pt.blocks.ravel()))
            for step, pt in enumerate(dynamics.orbit(cfg, x0, args.N, args.direction)))
    write_csv(out_dir / "orbit.csv", header, rows)
    return EXIT_OK


def run_birkhoff(args, cfg, out_dir: Path):
    f = parse_vector_spec(args.observable, cfg)
    x0 = dynamics.TorusPoint(parse_point(args.x0, cfg.d, cfg.n)) if args.x0 \
        else dynamics.TorusPoint(np.zeros((cfg.d, cfg.n)))
    checkpoints = parse_ints(args.checkpoints)
    write_manifest(out_dir, args, cfg,
                   {"checkpoints": checkpoints, "observable": f.to_records()})
    avgs = analysis.birkhoff_partial(cfg, f, x0, checkpoints)
    write_csv(out_dir / "birkhoff.csv", ["N", "birkhoff_re", "birkhoff_im"],
              ((N, float(a.real), float(a.imag)) for N, a in zip(checkpoints, avgs)))
    return EXIT_OK


def run_ergodicity(args, cfg, out_dir: Path):
    f = parse_vector_spec(args.observable, cfg) if args.observable \
        else presets.default_observables(cfg)[0][1]
    checkpoints = parse_ints(args.checkpoints)
    starts = Sampler(kind="monte_carlo", seed=args.seed, count=args.starts,
                     dims=(cfg.d, cfg.n)).points()
    write_manifest(out_dir, args, cfg,
                   {"checkpoints": checkpoints, "starts": args.starts,
                    "observable": f.to_records()})
    gaps = analysis.ergodicity_gaps(cfg, f, starts, checkpoints)
    write_csv(out_dir / "ergodicity.csv", ["N", "gap"],
              ((N, float(g)) for N, g in zip(checkpoints, gaps)))
    return EXIT_OK


def _correlation(args, cfg):
    phi = parse_vector_spec(args.phi, cfg) if args.phi else presets.mixing_vector(cfg)
    psi = parse_vector_spec(args.psi, cfg) if args.psi else phi
    sampler = make_sampler(args, cfg)
    series = analysis.correlation_series(cfg, phi, psi, args.Nmax, sampler)
    return phi, psi, sampler, series


def run_mixing(args, cfg, out_dir: Path):
    phi, psi, sampler, series = _correlation(args, cfg)
    write_manifest(out_dir, args, cfg,
                   {"Nmax": args.Nmax, "sampler": sampler.record(),
                    "phi": phi.to_records(), "psi": psi.to_records()})
    write_csv(out_dir / "mixing.csv", ["N", "re_cN", "im_cN", "stderr"],
              ((N, float(c.real), float(c.imag), float(s))
               for N, (c, s) in enumerate(zip(series.values, series.stderr))))
    if cfg.is_affine() and phi.support_size == 1 and psi.support_size == 1:
        oracle = analysis.affine_oracle_series(cfg, phi, psi, args.Nmax)
        write_csv(out_dir / "oracle.csv", ["N", "re_cN", "im_cN"],
                  ((N, float(c.real), float(c.imag)) for N, c in enumerate(oracle)))
    return EXIT_OK


def run_spectrum(args, cfg, out_dir: Path):
    phi, psi, sampler, series = _correlation(args, cfg)
    est = analysis.spectral_density(series, args.grid_size, args.bandwidth)
    write_manifest(out_dir, args, cfg,
                   {"Nmax": args.Nmax, "grid_size": args.grid_size,
                    "bandwidth": est.bandwidth, "sampler": sampler.record(),
                    "phi": phi.to_records(), "psi": psi.to_records(),
                    "flatness": est.flatness, "atom_score": est.atom_score,
                    "propagated_stderr": est.stderr})
    write_csv(out_dir / "spectrum.csv", ["theta", "density"],
              ((float(t), float(r)) for t, r in zip(est.grid, est.density)))
    return EXIT_OK


def run_mourre(args, cfg, out_dir: Path):
    chi = parse_chi(args.chi, cfg.n)
    limit = abs(commutator.g_function(cfg, args.j, chi).constant)
    if args.N:
        Ns = [args.N]
    else:
        Nstar = commutator.adaptive_mourre_N(cfg, args.j, chi)
        Ns = sorted({1, Nstar})
    write_manifest(out_dir, args, cfg,
                   {"j": args.j, "chi": chi.tolist(), "N": Ns, "limit": limit})
    samples = commutator.default_sample_points(cfg, args.j)
    constant = commutator.g_function(cfg, args.j, chi).constant
    rows = []
    failure = None
    for N in Ns:
        avgs = commutator.g_birkhoff_checkpoints(cfg, args.j, chi, [N], samples)[0]
        a = float(np.min(np.abs(avgs)))
        dev = float(np.max(np.abs(avgs - constant)))
        rows.append((N, a, dev))
        # a strict bound needs one sign and a gap away from zero
        if (avgs.min() < 0.0 < avgs.max()) or a <= commutator.DEGENERACY_TOL:
            failure = (N, a)
    write_csv(out_dir / "mourre.csv", ["N", "min_abs_gN", "max_dev_from_limit"], rows)
    if failure is not None:
        raise ContractViolation(
            f"sampled field g^(N) at N={failure[0]} has no strict bound "
            f"(min |g^(N)| = {failure[1]}, sign change across samples)")
    return EXIT_OK


def run_commutator_check(args, cfg, out_dir: Path):
    chi = parse_chi(args.chi, cfg.n)
    schedule = parse_floats(args.t_schedule)
    check = commutator.verify_commutator(cfg, args.j, chi, t_schedule=schedule)
    write_manifest(out_dir, args, cfg,
                   {"j": args.j, "chi": chi.tolist(), "t_schedule": schedule,
                    "extrapolated_residual": check.extrapolated})
    write_csv(out_dir / "commutator.csv", ["t", "residual"],
              zip(check.t_schedule, check.residuals))
    return EXIT_OK


def run_dini(args, cfg, out_dir: Path):
    grid = parse_floats(args.t_grid) if args.t_grid else \
        np.logspace(-4, 0, 33).tolist()
    profile = commutator.dini_profile(cfg, args.j, args.k, grid)
    write_manifest(out_dir, args, cfg,
                   {"j": args.j, "k": args.k,
                    "integral": profile.integral, "lipschitz": profile.lipschitz})
    write_csv(out_dir / "dini.csv", ["t", "dini_modulus"],
              zip(profile.t_grid, profile.moduli))
    return EXIT_OK


RUNNERS = {
    "validate": run_validate,
    "orbit": run_orbit,
    "birkhoff": run_birkhoff,
    "ergodicity": run_ergodicity,
    "mixing": run_mixing,
    "spectrum": run_spectrum,
    "mourre": run_mourre,
    "commutator-check": run_commutator_check,
    "dini": run_dini,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergodic-spectra",
        description="Skew-product torus dynamics: ergodicity, mixing and spectral diagnostics")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="system config JSON")
        p.add_argument("--out", default="out", help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=7, help="sampler seed")
        p.add_argument("--samples", type=int, default=2 ** 16, help="quadrature point budget")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads; affects wall time only, never results")
        p.add_argument("--sampler", default="rank1_lattice",
                       choices=["monte_carlo", "rank1_lattice", "kronecker"])

    common(sub.add_parser("validate", help="check the config and exit"))

    p = sub.add_parser("orbit", help="dump a forward or backward orbit")
    common(p)
    p.add_argument("--x0", help="start point 'a,b;c,d' (default origin)")
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--direction", default="forward", choices=["forward", "backward"])

    p = sub.add_parser("birkhoff", help="partial Birkhoff averages along one orbit")
    common(p)
    p.add_argument("--observable", required=True, help="character blocks or JSON terms")
    p.add_argument("--x0", help="start point (default origin)")
    p.add_argument("--checkpoints", default="1,10,100,1000,10000")

    p = sub.add_parser("ergodicity", help="uniform Birkhoff gap over random starts")
    common(p)
    p.add_argument("--observable", help="character blocks or JSON terms")
    p.add_argument("--starts", type=int, default=100)
    p.add_argument("--checkpoints", default="1000,10000")

    p = sub.add_parser("mixing", help="correlation series <phi, psi o T^N>")
    common(p)
    p.add_argument("--phi", help="vector (default: the mixing vector 1 x e_1)")
    p.add_argument("--psi", help="vector (default: same as phi)")
    p.add_argument("--Nmax", type=int, default=200)

    p = sub.add_parser("spectrum", help="Fejer spectral density of a correlation series")
    common(p)
    p.add_argument("--phi")
    p.add_argument("--psi")
    p.add_argument("--Nmax", type=int, default=200)
    p.add_argument("--grid-size", type=int, default=256, dest="grid_size")
    p.add_argument("--bandwidth", type=int, default=None)

    p = sub.add_parser("mourre", help="sampled strict lower bound on |g^(N)|")
    common(p)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--chi", default="1", help="character frequencies, comma separated")
    p.add_argument("--N", type=int, default=None, help="Birkhoff depth (default adaptive)")

    p = sub.add_parser("commutator-check", help="finite-difference commutator residuals")
    common(p)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--chi", default="1")
    p.add_argument("--t-schedule", default="1e-2,1e-3,1e-4,1e-5", dest="t_schedule")

    p = sub.add_parser("dini", help="Dini modulus of the perturbation derivative")
    common(p)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--t-grid", default=None, dest="t_grid")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = int(os.environ.get("ERGODIC_SPECTRA_THREADS", args.threads))
    args.threads = threads
    kernels.set_threads(threads)
    try:
        cfg = load_config(args.config)
        diagnostics = dynamics.validate_config(cfg)
        for diag in diagnostics:
            stream = sys.stderr if diag.level == "error" else sys.stdout
            print(f"{diag.level}: {diag.message}", file=stream)
        if any(d.level == "error" for d in diagnostics):
            return EXIT_CONFIG
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return RUNNERS[args.experiment](args, cfg, out_dir)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractViolation, ArithmeticError) as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
