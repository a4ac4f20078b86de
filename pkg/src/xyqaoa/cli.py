"""Command-line front end.

Every capability of the library is exposed as a subcommand so long grid
campaigns, bound evaluations, and report generation can run unattended.
Exit codes follow script-friendly conventions: 0 success, 1 runtime
failure, 2 usage error.  File outputs land under ``--output-dir`` (created
on demand); the worker pool honors the ``XYQAOA_THREADS`` environment
variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments, fitting, lieb_robinson, pontryagin, svg
from .optimize import OptimizerConfig, optimize_fixed_tf, optimize_free
from .subspace import Schedule, apply_schedule, fidelity

__all__ = ["main", "build_parser"]


def _ensure_outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _parse_schedule(text: str) -> Schedule | None:
    """Schedule from the CLI string; None for the empty protocol."""
    if not text.strip().strip(";"):
        return None
    return Schedule.from_string(text)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    schedule = _parse_schedule(args.schedule)
    if schedule is None:
        amps = np.zeros(args.n, dtype=complex)
        amps[0] = 1.0
        fid = float(abs(amps[-1]) ** 2)
    else:
        state = apply_schedule(schedule, args.n)
        amps = state.amplitudes
        fid = state.target_population()
    print(f"F={fid:.12f}")
    for site, amp in enumerate(amps, start=1):
        print(f"site {site}: {amp.real:+.12g} {amp.imag:+.12g}j")
    return 0


def cmd_optimize(args) -> int:
    config = OptimizerConfig(restarts=args.restarts, rng_seed=args.seed)
    if args.tf is not None:
        result = optimize_fixed_tf(args.n, args.p, args.tf, config=config)
    else:
        result = optimize_free(args.n, args.p, config=config)
    converged = sum(1 for r in result.restart_records if r.converged)
    doc = {
        "n": args.n,
        "p": args.p,
        "mode": result.mode,
        "tf": result.t_f,
        "restarts": args.restarts,
        "seed": args.seed,
        "best_fidelity": result.best_fidelity,
        "best_schedule": [float(d) for d in result.best_schedule.durations],
        "converged": converged,
    }
    out_dir = _ensure_outdir(args.output_dir)
    tf_tag = "free" if args.tf is None else f"tf{args.tf:g}"
    path = os.path.join(out_dir, f"optimize_n{args.n}_p{args.p}_{tf_tag}.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"best_fidelity={result.best_fidelity:.12f}")
    print(f"best_schedule={result.best_schedule.to_string()}")
    print(f"converged={converged}/{args.restarts}")
    print(f"json={path}")
    return 0


def cmd_grid(args) -> int:
    with open(args.spec) as fh:
        spec = experiments.GridSpec.from_json(fh.read())
    out_dir = _ensure_outdir(args.output_dir)
    csv_path = args.csv or os.path.join(out_dir, f"{spec.label}.csv")
    records = experiments.run_grid(
        spec,
        csv_path,
        global_seed=args.seed,
        workers=args.workers,
        max_cells=args.max_cells,
        resume=args.resume,
    )
    print(f"{len(records)} records in {csv_path}")
    return 0


def cmd_landscape(args) -> int:
    base = Schedule.from_string(args.base)
    axis_i = experiments.parse_range(args.grid[0])
    axis_j = experiments.parse_range(args.grid[1])
    matrix = experiments.landscape_slice(
        args.n, base, (args.vary[0], args.vary[1]), (axis_i, axis_j)
    )
    out_dir = _ensure_outdir(args.output_dir)
    stem = f"landscape_n{args.n}_v{args.vary[0]}_{args.vary[1]}"
    csv_path = os.path.join(out_dir, stem + ".csv")
    with open(csv_path, "w") as fh:
        fh.write("," + ",".join("%.17g" % v for v in axis_j) + "\n")
        for u, row in zip(axis_i, matrix):
            fh.write("%.17g," % u + ",".join("%.17g" % v for v in row) + "\n")
    svg_path = os.path.join(out_dir, stem + ".svg")
    with open(svg_path, "w") as fh:
        fh.write(
            svg.heatmap_svg(
                matrix,
                axis_j,
                axis_i,
                title=f"fidelity slice N={args.n}",
                x_label=f"duration[{args.vary[1]}]",
                y_label=f"duration[{args.vary[0]}]",
            )
        )
    print(f"max={matrix.max():.6f}")
    print(f"csv={csv_path}")
    print(f"svg={svg_path}")
    return 0


def cmd_lr_bound(args) -> int:
    velocity = lieb_robinson.lr_velocity(args.coupling, 1)
    distance = args.n - 1
    print("t,epsilon,bound,region")
    for t in experiments.parse_range(args.t_range):
        eps = lieb_robinson.lr_epsilon(t, distance, velocity)
        bound = lieb_robinson.lr_success_bound(t, distance, velocity)
        region = lieb_robinson.classify_region(t, distance, velocity)
        print("%.17g,%.17g,%.17g,%s" % (t, eps, bound, region))
    return 0


def cmd_pontryagin_check(args) -> int:
    schedule = _parse_schedule(args.schedule)
    if schedule is None:
        print("verdict=vacuous")
        return 0
    report = pontryagin.verify_pontryagin(schedule, args.n, args.tolerance)
    print(f"verdict={report.verdict}")
    print(f"final_fidelity={report.final_fidelity:.12f}")
    print(
        "switching_values="
        + ";".join("%.6g" % v for v in report.switching_values)
    )
    worst = max((f for _, f in report.segment_sign_violations), default=0.0)
    print(f"worst_sign_violation_fraction={worst:.6g}")
    return 0


def cmd_fit(args) -> int:
    records = experiments.read_records(args.csv)
    if not records:
        raise RuntimeError(f"no records in {args.csv}")
    columns = {
        "N": lambda r: float(r.n_sites),
        "p": lambda r: float(r.depth),
        "tf": lambda r: float("nan") if r.t_f is None else float(r.t_f),
        "best_fidelity": lambda r: r.best_fidelity,
    }
    for name in (args.x, args.y):
        if name not in columns:
            raise ValueError(f"unknown column {name!r} (choose from {sorted(columns)})")
    points = [
        (columns[args.x](r), columns[args.y](r))
        for r in records
        if np.isfinite(columns[args.x](r)) and np.isfinite(columns[args.y](r))
    ]
    fit_fn = {
        "quadratic": fitting.fit_quadratic,
        "inverted_exponential": fitting.fit_inverted_exponential,
        "linear": fitting.fit_linear,
    }[args.model]
    result = fit_fn(points)
    print(json.dumps(result.to_json_dict(), sort_keys=True))
    return 0


def _report_f_vs_p(records, out_dir: str) -> list[str]:
    written = []
    free = [r for r in records if r.t_f is None]
    for n in sorted({r.n_sites for r in free}):
        series = sorted((r.depth, r.best_fidelity) for r in free if r.n_sites == n)
        if len(series) < 2:
            continue
        plot = svg.LinePlot(
            title=f"best fidelity vs depth, N={n}",
            x_label="depth p",
            y_label="best fidelity",
        )
        plot.add_series([p for p, _ in series], [f for _, f in series], label=f"N={n}")
        path = os.path.join(out_dir, f"f_vs_p_n{n}.svg")
        plot.write(path)
        written.append(path)
    return written


def _report_f_vs_tf(records, out_dir: str) -> list[str]:
    written = []
    fixed = [r for r in records if r.t_f is not None]
    for n in sorted({r.n_sites for r in fixed}):
        rows = [r for r in fixed if r.n_sites == n]
        plot = svg.LinePlot(
            title=f"best fidelity vs total time, N={n}",
            x_label="total time t_f",
            y_label="best fidelity",
        )
        velocity = lieb_robinson.lr_velocity(2.0, 1)
        distance = n - 1
        tmax = max(r.t_f for r in rows)
        # regime boundaries: eps = 0.02 and eps = 1
        t_sup = (distance + np.log(0.01)) / velocity
        t_edge = (distance + np.log(0.5)) / velocity
        if t_sup > 0:
            plot.add_region(0.0, min(t_sup, tmax), "suppressed")
        if t_edge > t_sup:
            plot.add_region(min(t_sup, tmax), min(t_edge, tmax), "")
        for p in sorted({r.depth for r in rows}):
            series = sorted((r.t_f, r.best_fidelity) for r in rows if r.depth == p)
            if len(series) < 2:
                continue
            plot.add_series(
                [t for t, _ in series], [f for _, f in series], label=f"p={p}"
            )
        if not plot.series:
            continue
        path = os.path.join(out_dir, f"f_vs_tf_n{n}.svg")
        plot.write(path)
        written.append(path)
    return written


def _report_tf_vs_n(records, out_dir: str) -> list[str]:
    fixed = [r for r in records if r.t_f is not None]
    points = []
    for n in sorted({r.n_sites for r in fixed}):
        good = [r.t_f for r in fixed if r.n_sites == n and r.best_fidelity >= 0.99]
        if good:
            points.append((n, min(good)))
    if len(points) < 2:
        return []
    plot = svg.LinePlot(
        title="time to reach F=0.99 vs chain size",
        x_label="chain size N",
        y_label="total time",
    )
    plot.add_series([n for n, _ in points], [t for _, t in points], label="measured")
    fit = fitting.fit_linear(points)
    ns = [points[0][0], points[-1][0]]
    plot.add_series(
        ns,
        [fit.parameters[0] * n + fit.parameters[1] for n in ns],
        label="slope %.3g" % fit.parameters[0],
        dashed=True,
        markers=False,
    )
    velocity = lieb_robinson.lr_velocity(2.0, 1)
    plot.add_series(
        ns,
        [(n - 1) / velocity for n in ns],
        label="cone bound",
        dashed=True,
        markers=False,
    )
    path = os.path.join(out_dir, "tf_vs_n.svg")
    plot.write(path)
    return [path]


def cmd_report(args) -> int:
    out_dir = _ensure_outdir(args.output_dir)
    records = []
    for name in sorted(os.listdir(args.csv_dir)):
        if name.endswith(".csv"):
            records.extend(experiments.read_records(os.path.join(args.csv_dir, name)))
    if not records:
        raise RuntimeError(f"no experiment CSVs under {args.csv_dir}")
    written = (
        _report_f_vs_p(records, out_dir)
        + _report_f_vs_tf(records, out_dir)
        + _report_tf_vs_n(records, out_dir)
    )
    for path in written:
        print(path)
    print(f"{len(written)} figure(s) written")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xyqaoa",
        description="Simulate, optimize, bound, and report bang-bang state "
        "transfer on an open qubit chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_dir(p):
        p.add_argument(
            "--output-dir",
            default=".",
            help="directory for file outputs (created if absent)",
        )

    p = sub.add_parser("simulate", help="evaluate one protocol")
    p.add_argument("--n", type=int, required=True, help="chain size (>= 2)")
    p.add_argument(
        "--schedule",
        required=True,
        help='semicolon-separated durations "hop1;phase1;hop2;..." (may be empty)',
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="multi-start protocol optimization")
    p.add_argument("--n", type=int, required=True, help="chain size (>= 2)")
    p.add_argument("--p", type=int, required=True, help="protocol depth")
    p.add_argument(
        "--tf",
        type=float,
        default=None,
        help="fix the total time (omit for unconstrained total time)",
    )
    p.add_argument("--restarts", type=int, default=100, help="restart count")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    add_output_dir(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("grid", help="run a grid campaign from a JSON spec")
    p.add_argument("--spec", required=True, help="GridSpec JSON file")
    p.add_argument("--csv", default=None, help="journal path (default label.csv)")
    p.add_argument("--seed", type=int, default=0, help="global seed")
    p.add_argument("--workers", type=int, default=None, help="worker processes")
    p.add_argument(
        "--max-cells", type=int, default=None, help="run at most this many new cells"
    )
    p.add_argument(
        "--resume",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="skip cells already journaled",
    )
    add_output_dir(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("landscape", help="fidelity over a 2-D duration slice")
    p.add_argument("--n", type=int, required=True, help="chain size (>= 2)")
    p.add_argument("--base", required=True, help="base schedule string")
    p.add_argument(
        "--vary",
        type=int,
        nargs=2,
        required=True,
        metavar=("I", "J"),
        help="flat duration indices to vary",
    )
    p.add_argument(
        "--grid",
        nargs=2,
        required=True,
        metavar=("RANGE_I", "RANGE_J"),
        help='axis ranges, e.g. "0:0.05:2"',
    )
    add_output_dir(p)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("lr-bound", help="light-cone ceiling on a time range")
    p.add_argument("--n", type=int, required=True, help="chain size (>= 2)")
    p.add_argument(
        "--t-range", required=True, help='time range, e.g. "0:0.01:1"'
    )
    p.add_argument(
        "--coupling",
        type=float,
        default=2.0,
        help="max two-site coupling norm (default 2.0)",
    )
    p.set_defaults(func=cmd_lr_bound)

    p = sub.add_parser(
        "pontryagin-check", help="first-order optimality check of a protocol"
    )
    p.add_argument("--n", type=int, required=True, help="chain size (>= 2)")
    p.add_argument("--schedule", required=True, help="schedule string")
    p.add_argument(
        "--tolerance",
        type=float,
        default=pontryagin.DEFAULT_TOLERANCE,
        help="switching-function tolerance",
    )
    p.set_defaults(func=cmd_pontryagin_check)

    p = sub.add_parser("fit", help="fit a model to journaled results")
    p.add_argument("--csv", required=True, help="experiment journal")
    p.add_argument(
        "--model",
        required=True,
        choices=["quadratic", "inverted_exponential", "linear"],
    )
    p.add_argument("--x", default="p", help="x column (default p)")
    p.add_argument("--y", default="best_fidelity", help="y column")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="render SVG figures from journals")
    p.add_argument("--csv-dir", required=True, help="directory of journals")
    add_output_dir(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure, not usage
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
