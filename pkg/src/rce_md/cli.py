"""Command-line front end.

Subcommands chain into a pipeline::

    rce-md gen-truth --out run/truth
    rce-md synth     --in run/truth/density.json --N 200 --seed 1 --out run/field.bin
    rce-md estimate  --in run/field.bin --n 2 --prior run/truth/density.json --out run/est
    rce-md verify    --in run/est/density.json --moments run/est/moments.json
    rce-md arma      --in run/est/report.json --ar-reference run/truth/filter.json --out run/arma.json

Every run writes ``manifest.json`` (or ``<out>.manifest.json`` for single-file
outputs) with the resolved configuration.  Library errors exit with the
``exit_code`` of their class.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import json
import logging
import os
from pathlib import Path
import platform
import sys

import numpy as np

from . import __version__, io
from .arma import extract_arma
from .dual import SolverConfig
from .errors import GridMismatch, RCEError
from .indexing import MultiIndexSet
from .moments import MomentSequence, assemble_moment_matrix, estimate_biased, is_positive_definite
from .pipeline import (estimate_from_field, exact_moments, fit_periodogram_l2, solve_moments)
from .spectral import (RationalSpectralDensity, count_modes, evaluate, mode_bound, normalize,
                       total_variation, verify_moments)
from .synth import RNG_ALGORITHM, FilterCoefficients, RandomSource, generate_field, truth_density
from .torus import TorusGrid

log = logging.getLogger("rce_md")

EXIT_IO = 3


def _manifest_path(out):
    out = Path(out)
    return out / "manifest.json" if not out.suffix else out.with_name(out.name + ".manifest.json")


def _write_manifest(args, out, **extra):
    config = {k: v for k, v in vars(args).items() if k != "func"}
    doc = io._header("manifest", command=args.command, config=config, artifact_version=__version__,
                     numpy_version=np.__version__, python=platform.python_version(),
                     platform=platform.platform(), rng_algorithm=RNG_ALGORITHM, **extra)
    io.write_json(_manifest_path(out), doc)


def _solver_config(args):
    return SolverConfig(grid_m=args.grid_m, grad_tol=args.tol, max_iters=args.max_iters)


def _read_density(path):
    return io.density_from_dict(io.read_json(path))


def _prior(args, omega):
    if not args.prior:
        return None
    phi = _read_density(args.prior)
    if phi.omega != omega:
        raise GridMismatch(f"prior has order n={phi.omega.n}, d={phi.omega.d}; "
                           f"estimate uses n={omega.n}, d={omega.d}")
    return phi.p


def _write_density(out, phi, grid):
    io.write_json(out / "density.json", io.density_to_dict(phi))
    io.write_grid_csv(out / "density.csv", evaluate(phi, grid))


def cmd_gen_truth(args):
    if args.filter:
        fc = io.filter_from_dict(io.read_json(args.filter))
    else:
        fc = FilterCoefficients.benchmark()
    grid = TorusGrid(fc.d, args.grid_m)
    phi = truth_density(fc, grid)
    out = Path(args.out)
    _write_density(out, phi, grid)
    io.write_json(out / "filter.json", io.filter_to_dict(fc))
    io.write_json(out / "moments.json", io.moments_to_dict(exact_moments(phi, grid)))
    _write_manifest(args, out, d=fc.d, n=fc.n)
    print(f"truth density d={fc.d} n={fc.n} written to {out}")
    return 0


def cmd_synth(args):
    phi = _read_density(args.input)
    rs = RandomSource(args.seed)
    field = generate_field(phi, args.N, rs)
    out = Path(args.out)
    io.write_field(out, field)
    lag1 = estimate_biased(field, MultiIndexSet(field.d, 1))
    meta = io._header("field_meta", d=field.d, N=field.N, seed=args.seed, rng_algorithm=rs.algorithm,
                      density=io.density_to_dict(phi),
                      biased_c0=float(lag1.c0.real),
                      max_abs_lag1=float(np.max(np.abs(lag1.values[1:]))))
    io.write_json(out.with_name(out.name + ".meta.json"), meta)
    _write_manifest(args, out)
    print(f"{field.N}^{field.d} field written to {out}")
    return 0


def _load_moments_or_field(args):
    path = Path(args.input)
    if path.suffix == ".json":
        return io.moments_from_dict(io.read_json(path)), None
    return None, io.read_field(path)


def cmd_estimate(args):
    config = _solver_config(args)
    c, field = _load_moments_or_field(args)
    if field is None:
        if args.n is not None and args.n != c.omega.n:
            raise GridMismatch(f"moment file has n={c.omega.n}, --n asks for {args.n}")
        phi, report = solve_moments(c, _prior(args, c.omega), config)
        branch = "given"
    else:
        omega = MultiIndexSet(field.d, args.n if args.n is not None else 2)
        est = estimate_from_field(field, omega.n, _prior(args, omega), config, args.statistic)
        phi, report, c, branch = est.density, est.report, est.moments, est.branch
    out = Path(args.out)
    grid = config.grid(c.omega.d)
    _write_density(out, phi, grid)
    io.write_json(out / "moments.json", io.moments_to_dict(c))
    io.write_json(out / "report.json", io.report_to_dict(
        report, statistic=branch, p=io._coef_list(c.omega, phi.p.box)))
    _write_manifest(args, out, statistic=branch)
    print(f"statistic={branch} iterations={report.iterations} "
          f"moment_residual={report.moment_residual:.3e} lambda_min={report.lambda_min:.3e}")
    return 0


def verify_summary(phi, c, grid):
    """Residuals, positivity flags and mode count of ``phi`` against ``c``."""
    if phi.omega != c.omega:
        raise GridMismatch(f"density has n={phi.omega.n}, d={phi.omega.d}; "
                           f"moments have n={c.omega.n}, d={c.omega.d}")
    res = verify_moments(phi, c, grid)
    t_pd, t_min = is_positive_definite(assemble_moment_matrix(c))
    l_pd, l_min = is_positive_definite(phi.lam.matrix(), rtol=0.0)
    modes = count_modes(phi, grid)
    bound = mode_bound(c.omega.n, c.omega.d)
    return {"residual_linf": res.linf, "residual_l2": res.l2,
            "moment_matrix_pd": t_pd, "moment_matrix_lambda_min": t_min,
            "lambda_matrix_pd": l_pd, "lambda_matrix_lambda_min": l_min,
            "modes": modes.count, "mode_plateau": modes.plateau, "mode_bound": bound,
            "within_mode_bound": modes.count <= bound}


def cmd_verify(args):
    phi = _read_density(args.input)
    c = io.moments_from_dict(io.read_json(args.moments))
    summary = verify_summary(phi, c, TorusGrid(phi.omega.d, args.grid_m))
    for key, val in summary.items():
        print(f"{key}: {val}")
    if args.out:
        io.write_json(args.out, io._header("verify", **summary))
        _write_manifest(args, args.out)
    return 0


def _compare_one(field, n, p, config, truth, grid):
    est = estimate_from_field(field, n, p, config)
    l2 = fit_periodogram_l2(field, n, p, config)
    row = {"convex_residual": verify_moments(est.density, est.moments, grid).linf,
           "l2_residual": verify_moments(l2.density, est.moments, grid).linf,
           "statistic": est.branch}
    if truth is not None:
        t = normalize(evaluate(truth, grid))
        row["convex_tv"] = total_variation(normalize(evaluate(est.density, grid)), t)
        row["l2_tv"] = total_variation(normalize(evaluate(l2.density, grid)), t)
    return row, est, l2


def _mc_worker(job):
    truth, N, seed, n, p, config = job
    field = generate_field(truth, N, RandomSource(seed))
    return _compare_one(field, n, p, config, truth, config.grid(truth.omega.d))[0]


def _workers():
    cap = os.environ.get("RCE_MD_THREADS")
    return max(1, int(cap)) if cap else (os.cpu_count() or 1)


def cmd_compare_l2(args):
    config = _solver_config(args)
    truth = _read_density(args.truth) if args.truth else None
    out = Path(args.out)
    n = args.n if args.n is not None else 2
    if args.n_seeds:
        if truth is None:
            print("error: --n-seeds needs --truth", file=sys.stderr)
            return 2
        omega = MultiIndexSet(truth.omega.d, n)
        p = _prior(args, omega)
        jobs = [(truth, args.N, args.seed + i, n, p, config) for i in range(args.n_seeds)]
        if _workers() == 1:
            rows = [_mc_worker(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=min(_workers(), len(jobs))) as pool:
                rows = list(pool.map(_mc_worker, jobs))
        summary = {"seeds": [args.seed + i for i in range(args.n_seeds)], "runs": rows,
                   "mean_convex_tv": float(np.mean([r["convex_tv"] for r in rows])),
                   "mean_l2_tv": float(np.mean([r["l2_tv"] for r in rows]))}
    else:
        if not args.input:
            print("error: compare-l2 needs --in or --n-seeds", file=sys.stderr)
            return 2
        field = io.read_field(args.input)
        omega = MultiIndexSet(field.d, n)
        grid = config.grid(field.d)
        row, est, l2 = _compare_one(field, n, _prior(args, omega), config, truth, grid)
        _write_density(out / "convex", est.density, grid)
        _write_density(out / "l2", l2.density, grid)
        summary = {"runs": [row]}
    io.write_json(out / "compare.json", io._header("compare_l2", **summary))
    _write_manifest(args, out)
    for key, val in summary.items():
        if key != "runs":
            print(f"{key}: {val}")
    for row in summary["runs"]:
        print(json.dumps(row))
    return 0


def cmd_arma(args):
    doc = io.read_json(args.input)
    report = io.report_from_dict(doc)
    omega = report.lambda_star.omega
    if "p" in doc:
        p = MomentSequence.from_half(omega, io._half_values(omega, doc["p"]))
    else:
        p = MomentSequence.from_mapping(omega, {(0,) * omega.d: 1.0})
    phi = RationalSpectralDensity(p, report.lambda_star)
    ref = io.filter_from_dict(io.read_json(args.ar_reference)) if args.ar_reference else None
    c = io.moments_from_dict(io.read_json(args.moments)) if args.moments else None
    model = extract_arma(phi, ref, moments=c, grid=TorusGrid(omega.d, args.grid_m),
                         tol=args.arma_tol)
    io.write_json(args.out, io.arma_to_dict(model))
    _write_manifest(args, args.out)
    print(f"{model.form} model written to {args.out}")
    return 0


def _common(parser):
    parser.add_argument("--config", help="JSON file of flag defaults (keys use underscores)")
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--n", type=int, default=None, help="order of the index set (default 2)")
    parser.add_argument("--grid-m", type=int, default=64, help="quadrature nodes per axis")
    parser.add_argument("--N", type=int, default=200, help="field samples per axis")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--tol", type=float, default=1e-8, help="moment tolerance relative to c_0")
    parser.add_argument("--max-iters", type=int, default=500)
    parser.add_argument("--statistic", choices=["auto", "biased", "unbiased"], default="auto")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="rce-md", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-truth", help="write the benchmark (or a given) filter density")
    _common(p)
    p.add_argument("--filter", help="filter JSON with nested lists b, a")
    p.add_argument("--out", default="truth")
    p.set_defaults(func=cmd_gen_truth)

    p = sub.add_parser("synth", help="draw a lattice field from a density file")
    _common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default="field.bin", help="'.csv' selects the text format")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="estimate a density from a field or a moment file")
    _common(p)
    p.add_argument("--in", dest="input", required=True, help="field file or moments .json")
    p.add_argument("--prior", help="density JSON whose numerator P is used (default P = 1)")
    p.add_argument("--out", default="estimate")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="check a density against a moment file")
    _common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--moments", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare-l2", help="convex estimator against the periodogram L2 fit")
    _common(p)
    p.add_argument("--in", dest="input", help="field file (single run)")
    p.add_argument("--truth", help="density JSON used for TV distances and Monte-Carlo fields")
    p.add_argument("--prior")
    p.add_argument("--n-seeds", type=int, default=0, help="Monte-Carlo runs from --seed upward")
    p.add_argument("--out", default="compare")
    p.set_defaults(func=cmd_compare_l2)

    p = sub.add_parser("arma", help="ARMA form of a solved report")
    _common(p)
    p.add_argument("--in", dest="input", required=True, help="report.json from estimate")
    p.add_argument("--ar-reference", help="filter JSON supplying the AR taps")
    p.add_argument("--moments", help="moment file; enables the solved-residual check")
    p.add_argument("--arma-tol", type=float, default=1e-6)
    p.add_argument("--out", default="arma.json")
    p.set_defaults(func=cmd_arma)
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = io.read_json(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
        # config supplies defaults; explicit flags still win
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None):
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RCEError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
