"""Command-line front end.

Exit codes: 0 converged (or all checks pass), 1 a check failed or a run
aborted, 2 iteration limit reached, 3 diverged, 4 config error.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import replace
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import diagnostics as diag
from . import operators as ops
from . import schedules as sch
from .algorithms import CONVERGED, DIVERGED, MAX_ITER, hypothesis_check, run, simulate_observed
from .exceptions import ConfigError, InnerSolveError, NoSolutionError, ValidationError

log = logging.getLogger("proxpoint")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MAX_ITER = 2
EXIT_DIVERGED = 3
EXIT_CONFIG = 4

STATUS_EXIT = {CONVERGED: EXIT_OK, MAX_ITER: EXIT_MAX_ITER, DIVERGED: EXIT_DIVERGED}


def execute(cfg, validate=True):
    """Run one experiment config and return its trace."""
    rc = replace(cfg.run, validate=validate)
    if cfg.mode == "observed":
        return simulate_observed(cfg.op, cfg.schedules, rc)
    return run(cfg.variant, cfg.op, cfg.schedules, cfg.x0, rc)


def summary_line(trace):
    final = trace.final.dist_to_target
    parts = [
        f"status={trace.status}",
        f"iters={trace.iterations}",
        f"final_dist={'NA' if final is None else format(final, '.6e')}",
    ]
    gap = trace.max_gap()
    if gap is not None:
        parts.append(f"max_gap={gap:.6e}")
    return " ".join(parts)


def _write_trace(trace, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        trace.write_csv(fh)


def _config_failure(exc):
    print(f"config error: {exc}", file=sys.stderr)
    return EXIT_CONFIG


def cmd_run(args):
    try:
        cfg = cfgmod.load(args.config)
        trace = execute(cfg, validate=not args.no_validate)
    except ConfigError as exc:
        return _config_failure(exc)
    except ValidationError as exc:
        lines = [f"{c.name} ({c.reason})" for c in exc.report.failures()]
        return _config_failure(f"schedules fail {exc.report.hset}: " + "; ".join(lines))
    except InnerSolveError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_FAILED
    output = Path(args.output) if args.output else cfg.output
    _write_trace(trace, output)
    if not args.quiet:
        print(summary_line(trace))
    return STATUS_EXIT[trace.status]


# --------------------------------------------------------------------------
# sweep


def _run_cell(cell):
    idx, cfg, validate = cell
    try:
        trace = execute(cfg, validate=validate)
    except (ValidationError, InnerSolveError) as exc:
        return idx, None, str(exc)
    _write_trace(trace, cfg.output)
    return idx, trace, None


def _split_values(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def cmd_sweep(args):
    try:
        base = cfgmod.load(args.config)
    except ConfigError as exc:
        return _config_failure(exc)
    values = _split_values(args.values)
    if not values:
        return _config_failure("sweep needs at least one value")
    out = Path(args.output) if args.output else base.output
    cells = []
    for k, value in enumerate(values):
        try:
            cell = cfgmod.apply_sweep(base, args.param, value)
        except ValueError as exc:
            return _config_failure(f"--param {args.param} = {value!r}: {exc}")
        cell = replace(cell.seeded(k), output=out.with_name(f"{out.stem}_cell{k}{out.suffix or '.csv'}"))
        cells.append((k, cell, not args.no_validate))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    results.sort(key=lambda r: r[0])

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cell", "value", "status", "iters_to_tol", "final_dist"])
    codes = []
    for (k, trace, error), value in zip(results, values):
        if trace is None:
            w.writerow([k, value, "ERROR", "NA", "NA"])
            print(f"cell {k}: {error}", file=sys.stderr)
            codes.append(EXIT_CONFIG)
            continue
        hit = trace.iterations if trace.status == CONVERGED else None
        final = trace.final.dist_to_target
        w.writerow([k, value, trace.status, "NA" if hit is None else hit, "NA" if final is None else repr(final)])
        codes.append(STATUS_EXIT[trace.status])
    table = buf.getvalue()
    summary = out.with_name(f"{out.stem}_summary.csv")
    summary.parent.mkdir(parents=True, exist_ok=True)
    summary.write_text(table)
    if not args.quiet:
        sys.stdout.write(table)
    if EXIT_CONFIG in codes:
        return EXIT_CONFIG
    return max(codes)


# --------------------------------------------------------------------------
# check


def run_checks(cfg, trials=1000, seed=0):
    """Return ``[(name, status, detail)]`` with status ``pass``/``fail``/``skip``."""
    items = []
    report = hypothesis_check(cfg.variant, cfg.schedules)
    failed = "; ".join(c.name for c in report.failures())
    items.append(("validator", "pass" if report.passed else "fail", f"{report.hset}" + (f" failed: {failed}" if failed else "")))

    ne = diag.probe_nonexpansive(cfg.op, trials=trials, seed=seed, inner_tol=cfg.run.inner_tol)
    items.append(("nonexpansive", "pass" if ne.passed else "fail", f"max_ratio={ne.max_ratio:.15g} trials={trials}"))

    zs = cfg.op.zero_set()
    if zs is None:
        items.append(("limit_curve", "skip", "no zero-set oracle: skipped"))
    elif zs.empty:
        items.append(("limit_curve", "skip", "F empty: skipped"))
    else:
        u = np.asarray(cfg.schedules.u.limit(), dtype=np.float64)
        curve = diag.resolvent_limit_curve(cfg.op, u, diag.DEFAULT_LAMBDAS, cfg.run.inner_tol)
        items.append(
            (
                "limit_curve",
                "pass" if curve.passes() else "fail",
                " ".join(f"d({lam:g})={d:.3e}" for lam, d in curve.points),
            )
        )
    return items


def cmd_check(args):
    try:
        cfg = cfgmod.load(args.config)
    except ConfigError as exc:
        return _config_failure(exc)
    try:
        items = run_checks(cfg, trials=args.trials, seed=cfg.seed or 0)
    except (InnerSolveError, NoSolutionError) as exc:
        print(f"check aborted: {exc}", file=sys.stderr)
        return EXIT_FAILED
    for name, status, detail in items:
        if args.format == "kv":
            print(f'check={name} status={status} detail="{detail}"')
        else:
            print(f"[{status.upper():4}] {name}: {detail}")
    return EXIT_OK if all(s != "fail" for _, s, _ in items) else EXIT_FAILED


def cmd_catalog(args):
    print("operators:")
    print("  identity                 A x = x (needs dim)")
    print("  quadratic:Q:b            A x = Q x - b, Q symmetric PSD (row-major)")
    print("  box:lo:hi                normal cone of [lo, hi]")
    print("  ball:center:radius       normal cone of a closed ball")
    print("  skew:S                   A x = S x, S' = -S (row-major)")
    print("  constant:c               A x = c (no zeros unless c = 0)")
    print(f"  smooth:name:center       gradient of {' | '.join(sorted(ops.SMOOTH_FUNCTIONS))} centred at center")
    for title, fams in (
        ("scalar schedules (beta, alpha, lambda)", sch.SCALAR_FAMILIES),
        ("vector schedules (u)", sch.VECTOR_FAMILIES),
        ("error models (error)", sch.ERROR_FAMILIES),
    ):
        print(f"{title}:")
        for lit, meaning in fams.items():
            print(f"  {lit:24} {meaning}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="proxpoint", description="Generalized proximal point experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one config and write its CSV trace")
    r.add_argument("config")
    r.add_argument("--no-validate", action="store_true", help="skip the hypothesis check")
    r.add_argument("--quiet", action="store_true")
    r.add_argument("-o", "--output", help="CSV path (overrides `output` in the config)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a config once per parameter value")
    s.add_argument("config")
    s.add_argument("--param", required=True, help="u, x0, error.bound, beta.p, alpha.a, ...")
    s.add_argument("--values", required=True, help="comma-separated values; vectors use spaces")
    s.add_argument("--no-validate", action="store_true")
    s.add_argument("--quiet", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output", help="base CSV path for cell traces")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check", help="validate schedules and probe the operator")
    c.add_argument("config")
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--format", choices=("text", "kv"), default="text")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("catalog", help="list operator kinds and schedule families")
    k.set_defaults(func=cmd_catalog)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
