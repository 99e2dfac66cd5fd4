"""Command line entry point: ``qaoa-depth {gen,run,fit,scaling,plot,profile}``.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 fit failure.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .artifacts import (
    RunConfig,
    fit_json,
    parse_provenance,
    provenance_line,
    read_summary_csv,
    results_csv,
    summary_csv,
)
from .errors import FitError
from .experiments import RNG_PROVENANCE, density_sweep, error_profile, instance_seed
from .fitting import fit_logistic, fit_scaling, logistic
from .sat import generate_instance, instance_to_json
from .training import TrainConfig

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_FIT = 0, 1, 2, 3

_MONOTONE_TOL = 1e-10


class _Fail(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("QAOA_DEPTH_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise _Fail(EXIT_VALIDATION, f"QAOA_DEPTH_JOBS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise _Fail(EXIT_RUNTIME, f"cannot write {path}: {exc}") from None


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Fail(EXIT_VALIDATION, f"cannot read {path}: {exc.strerror}") from None


def cmd_gen(args) -> int:
    out = Path(args.out)
    files = []
    for i in range(args.count):
        seed = instance_seed(args.seed, i)
        try:
            inst = generate_instance(args.n, args.m, seed)
        except ValueError as exc:
            raise _Fail(EXIT_VALIDATION, str(exc)) from None
        name = f"instance_{i:04d}.json"
        _write(out / name, instance_to_json(inst))
        files.append({"file": name, "seed": seed})
    manifest = {
        "tool": "qaoa_depth",
        "version": __version__,
        "n": args.n,
        "m": args.m,
        "count": args.count,
        "master_seed": args.seed,
        "rng": RNG_PROVENANCE,
        "instances": files,
    }
    _write(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def _load_config(args) -> RunConfig:
    try:
        doc = json.loads(_read(args.config))
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_VALIDATION, f"{args.config}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise _Fail(EXIT_VALIDATION, f"{args.config}: expected a JSON object")
    try:
        cfg = RunConfig.from_dict(doc)
        train = cfg.train
        if args.seeds is not None:
            train = replace(train, seeds_per_step=args.seeds)
        overrides = {"train": train}
        if args.n is not None:
            overrides["n_list"] = tuple(args.n)
        if args.instances is not None:
            overrides["instances_per_density"] = args.instances
        if args.epsilon is not None:
            overrides["epsilon"] = args.epsilon
        if args.p_cap is not None:
            overrides["p_cap"] = args.p_cap
        if args.master_seed is not None:
            overrides["master_seed"] = args.master_seed
        if args.out is not None:
            overrides["output_dir"] = args.out
        return replace(cfg, **overrides)
    except (TypeError, ValueError) as exc:
        raise _Fail(EXIT_VALIDATION, f"{args.config}: {exc}") from None


def cmd_run(args) -> int:
    cfg = _load_config(args)
    jobs = _jobs(args)
    out = Path(cfg.output_dir)
    chash = cfg.config_hash()
    started = time.time()
    per_n = {}
    for n in cfg.n_list:
        t0 = time.time()
        try:
            summary = density_sweep(n, cfg.densities, cfg.instances_per_density, cfg.epsilon,
                                    cfg.p_cap, cfg.train, cfg.master_seed, jobs)
        except ValueError as exc:
            raise _Fail(EXIT_VALIDATION, str(exc)) from None
        except Exception as exc:
            raise _Fail(EXIT_RUNTIME, str(exc)) from None
        for rec in summary.records:
            fs = [f for _, f in rec.f_trace]
            if any(b > a + _MONOTONE_TOL for a, b in zip(fs, fs[1:])):
                raise _Fail(EXIT_RUNTIME, f"{rec.instance_id}: energy error increased with depth")
        header = provenance_line(cfg.master_seed, chash, n=n, epsilon=cfg.epsilon)
        _write(out / f"n{n}" / "summary.csv", summary_csv(summary, header))
        _write(out / f"n{n}" / "results.csv", results_csv(summary, header))
        per_n[str(n)] = {"wall_time_s": round(time.time() - t0, 3),
                         "censored": sum(r.censored for r in summary.rows)}
    meta = {
        "tool": "qaoa_depth",
        "version": __version__,
        "config": cfg.to_dict(),
        "config_hash": chash,
        "master_seed": cfg.master_seed,
        "rng": RNG_PROVENANCE,
        "jobs": jobs,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "wall_time_s": round(time.time() - started, 3),
        "per_n": per_n,
        "note": "trained energies upper-bound the ansatz minimum, so p_star upper-bounds the ideal critical depth",
    }
    _write(out / "metadata.json", json.dumps(meta, indent=2) + "\n")
    return EXIT_OK


def cmd_fit(args) -> int:
    text = _read(args.summary)
    try:
        points = read_summary_csv(text)
    except ValueError as exc:
        raise _Fail(EXIT_VALIDATION, f"{args.summary}: {exc}") from None
    prov = parse_provenance(text)
    try:
        fit = fit_logistic(points)
    except ValueError as exc:
        raise _Fail(EXIT_VALIDATION, f"{args.summary}: {exc}") from None
    except FitError as exc:
        print(json.dumps({"error": str(exc), "best": exc.best}), file=sys.stderr)
        raise _Fail(EXIT_FIT, f"fit failed: {exc}") from None
    extra = {"tool": "qaoa_depth", "version": __version__, "source": str(args.summary),
             "points": len(points)}
    n = args.n if args.n is not None else prov.get("n")
    if n is not None:
        extra["n"] = int(n)
    for key in ("master_seed", "config_hash"):
        if key in prov:
            extra[key] = prov[key]
    text = fit_json(fit, **extra)
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_scaling(args) -> int:
    pairs = []
    for path in args.fits:
        try:
            doc = json.loads(_read(path))
            pairs.append((int(doc["n"]), float(doc["p_max"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise _Fail(EXIT_VALIDATION, f"{path}: needs numeric 'n' and 'p_max' ({exc})") from None
    try:
        res = fit_scaling(pairs)
    except ValueError as exc:
        raise _Fail(EXIT_VALIDATION, str(exc)) from None
    doc = res.as_dict()
    doc.update({"tool": "qaoa_depth", "version": __version__,
                "points": [{"n": n, "p_max": p} for n, p in pairs]})
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_GNUPLOT = """\
# {prov}
set datafile separator ","
set xlabel "clause density alpha"
set ylabel "mean critical depth p*"
set key top left
{curve_def}plot "{data}" every ::1 using 2:(strcol(1) eq "data" ? $3 : 1/0):4 with yerrorbars title "mean p* (3 sigma)"{curve_plot}
"""


def cmd_plot(args) -> int:
    text = _read(args.summary)
    try:
        points = read_summary_csv(text)
    except ValueError as exc:
        raise _Fail(EXIT_VALIDATION, f"{args.summary}: {exc}") from None
    fit = None
    if args.fit:
        try:
            fit = json.loads(_read(args.fit))
            fit = {k: float(fit[k]) for k in ("p_max", "kappa", "alpha_c")}
        except (KeyError, TypeError, ValueError) as exc:
            raise _Fail(EXIT_VALIDATION, f"{args.fit}: malformed fit JSON ({exc})") from None
    out = Path(args.out)
    rows = ["series,alpha,value,err3"]
    for a, mean, sigma in points:
        rows.append(f"data,{a!r},{mean!r},{'' if sigma is None else repr(3 * sigma)}")
    if fit is not None:
        lo = min(a for a, _, _ in points)
        hi = max(a for a, _, _ in points)
        for a in np.linspace(0.0, hi + 0.25 * (hi - lo), 101):
            v = float(logistic(a, fit["p_max"], fit["kappa"], fit["alpha_c"]))
            rows.append(f"fit,{float(a)!r},{v!r},")
    _write(out / "plot_data.csv", "\n".join(rows) + "\n")
    if args.emit == "gnuplot":
        if fit is None:
            curve_def, curve_plot = "", ""
        else:
            curve_def = (f"pmax = {fit['p_max']!r}\nkappa = {fit['kappa']!r}\nalphac = {fit['alpha_c']!r}\n"
                         "f(x) = pmax / (1 + exp(-kappa * (x - alphac)))\n")
            curve_plot = ', f(x) with lines title "logistic fit"'
        prov = parse_provenance(text)
        script = _GNUPLOT.format(
            prov=" ".join(f"{k}={v}" for k, v in sorted(prov.items())) or "qaoa_depth plot",
            curve_def=curve_def,
            data="plot_data.csv",
            curve_plot=curve_plot,
        )
        _write(out / "plot.gp", script)
    return EXIT_OK


def cmd_profile(args) -> int:
    try:
        densities = [Fraction(a) for a in args.densities]
        train = TrainConfig(seeds_per_step=args.seeds, rng_seed=args.master_seed)
        rows = error_profile(args.n, densities, args.instances, args.depths, train,
                             args.master_seed, _jobs(args))
    except ValueError as exc:
        raise _Fail(EXIT_VALIDATION, str(exc)) from None
    lines = [provenance_line(args.master_seed, "-", n=args.n).rstrip("\n"),
             "alpha,depth,mean_f,sigma3,mean_overlap,mean_lower_bound,count"]
    for r in rows:
        s3 = "" if r.sigma_mean is None else repr(3 * r.sigma_mean)
        lines.append(f"{float(r.alpha)!r},{r.depth},{r.mean_f!r},{s3},{r.mean_overlap!r},"
                     f"{r.mean_lower_bound!r},{r.count}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaoa-depth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate random MAX-2-SAT instance files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="critical-depth density sweep from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--jobs", type=int, help="worker processes (default: $QAOA_DEPTH_JOBS or all cores)")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--instances", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--p-cap", type=int)
    p.add_argument("--seeds", type=int, help="random starts per optimization step")
    p.add_argument("--master-seed", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fit", help="logistic fit of a summary CSV")
    p.add_argument("summary")
    p.add_argument("--out")
    p.add_argument("--n", type=int, help="qubit count recorded in the fit (default: from the CSV header)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scaling", help="linear fit of p_max against n")
    p.add_argument("fits", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("plot", help="emit plot data and a gnuplot script")
    p.add_argument("summary")
    p.add_argument("--fit")
    p.add_argument("--emit", choices=["csv", "gnuplot"], default="gnuplot")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("profile", help="mean energy error vs density at fixed depths")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--densities", nargs="+", required=True)
    p.add_argument("--depths", type=int, nargs="+", required=True)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seeds", type=int, default=25)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"qaoa-depth {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
