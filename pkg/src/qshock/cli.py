"""Command-line surface: validate, map, sweep, optimize, kernel dumps, oracle.

Exit codes: 0 success, 1 validation error, 2 numerical failure, 64 usage
error.  Every run that writes outputs also writes a `<out>.manifest.json`
run manifest listing the inputs, settings, outputs, and fingerprints, so
artifacts are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .kernels import (KernelSet, QuadratureError, QuadratureSettings,
                      commutator_kernel_regulated, commutator_kernel_zero_split)
from .mapper import (DEFAULT_RESOLUTION, DEFAULT_WINDOW, capacity_map, coupling_sweep,
                     diff_map, energy_map, optimize_phases, read_grid_csv,
                     write_grid_csv, write_sweep_csv)
from .oracle import OracleBudgetError, run_standard_comparisons
from .scenario import ValidationError, load_scenario_file, scenario_fingerprint

__all__ = ["main", "RunManifest"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

TOLERANCE_ENV = "QSHOCK_KERNEL_RTOL"


@dataclass
class RunManifest:
    """What a run read, what it wrote, and under which settings."""

    subcommand: str
    config: str | None
    outputs: list[str] = field(default_factory=list)
    settings: dict = field(default_factory=dict)
    fingerprints: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def write(self, anchor_path: str) -> None:
        path = anchor_path
        if path.endswith(".csv"):
            path = path[:-4]
        path += ".manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.outputs.append(path)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # unknown flags and malformed values -> 64
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _settings_from(args) -> QuadratureSettings:
    tol = getattr(args, "tolerance", None)
    if tol is None:
        env = os.environ.get(TOLERANCE_ENV)
        tol = float(env) if env else 1e-8
    return QuadratureSettings(rel_tol=tol)


def _window_from(args):
    if args.window is None:
        return DEFAULT_WINDOW
    parts = [float(v) for v in args.window.split(",")]
    if len(parts) != 4:
        raise ValidationError("--window", "expected xmin,xmax,ymin,ymax")
    return tuple(parts)


def _point_from(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 2:
        parts.append(0.0)
    if len(parts) != 3:
        raise ValidationError("--point", "expected x,y[,z]")
    return tuple(parts)


def build_parser() -> _Parser:
    parser = _Parser(prog="qshock",
                     description="Shockwave fields from pre-timed delta-coupled "
                                 "emitters: energy maps, receiver capacity, sweeps.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, needs_out=True):
        p.add_argument("--config", required=True, help="scenario configuration file")
        if needs_out:
            p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--tolerance", type=float, default=None,
                       help=f"kernel relative tolerance (default 1e-8 or "
                            f"${TOLERANCE_ENV})")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="parallel workers (results identical for any value)")

    p = sub.add_parser("validate", help="check a scenario configuration")
    p.add_argument("--config", required=True)

    for name, help_text in (("energy-map", "energy density over an (x, y) window"),
                            ("capacity-map", "channel capacity vs receiver location")):
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        p.add_argument("--window", default=None, help="xmin,xmax,ymin,ymax "
                                                      "(default 0,16,0,16)")
        p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)

    p = sub.add_parser("diff", help="cellwise difference of two maps")
    p.add_argument("--a", required=True, help="minuend CSV")
    p.add_argument("--b", required=True, help="subtrahend CSV")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="capacity vs receiver coupling strength")
    add_common(p)
    p.add_argument("--lambda-min", type=float, default=0.0)
    p.add_argument("--lambda-max", type=float, default=8.0)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("optimize", help="search emitter phases for a target")
    add_common(p)
    p.add_argument("--objective", choices=("energy", "capacity"), required=True)
    p.add_argument("--point", required=True, help="x,y[,z] objective location")
    p.add_argument("--budget", type=int, default=800)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("kernels", help="dump kernel profiles as CSV")
    p.add_argument("--kind", choices=("commutator", "radiation-time",
                                      "radiation-radial", "variance"),
                   required=True)
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--r", default="0.5,8,32", help="min,max,count for r (or d)")
    p.add_argument("--dt", default="5", help="time difference (single value)")
    p.add_argument("--out", required=True)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--cross-check", action="store_true",
                   help="add regulator/zero-split columns (commutator only)")

    p = sub.add_parser("oracle", help="pipeline vs exact Fock comparison table")
    p.add_argument("--tolerance", type=float, default=1e-6)

    return parser


# ----------------------------------------------------------------------
# subcommand bodies
# ----------------------------------------------------------------------

def _cmd_validate(args) -> int:
    scenario = load_scenario_file(args.config)
    print(f"ok: {scenario.n_emitters} emitters, receiver couples at "
          f"t={scenario.receiver.coupling_time}, evaluation time "
          f"{scenario.evaluation_time}")
    print(f"fingerprint: {scenario_fingerprint(scenario)}")
    return EXIT_OK


def _cmd_map(args, quantity: str) -> int:
    t0 = time.perf_counter()
    scenario = load_scenario_file(args.config)
    settings = _settings_from(args)
    window = _window_from(args)
    fn = energy_map if quantity == "energy" else capacity_map
    grid = fn(scenario, window, args.resolution, settings, threads=args.threads)
    write_grid_csv(grid, args.out)
    manifest = RunManifest(quantity + "-map", args.config, [args.out],
                           {"window": list(window), "resolution": args.resolution,
                            "rel_tol": settings.rel_tol, "threads": args.threads},
                           {"scenario": scenario_fingerprint(scenario),
                            "grid": grid.fingerprint},
                           time.perf_counter() - t0)
    manifest.write(args.out)
    print(f"wrote {args.out} ({grid.values.shape[0]}x{grid.values.shape[1]} cells, "
          f"{manifest.wall_time_s:.1f}s)")
    return EXIT_OK


def _cmd_diff(args) -> int:
    t0 = time.perf_counter()
    grid = diff_map(read_grid_csv(args.a), read_grid_csv(args.b))
    write_grid_csv(grid, args.out)
    manifest = RunManifest("diff", None, [args.out],
                           {"a": args.a, "b": args.b},
                           {"grid": grid.fingerprint}, time.perf_counter() - t0)
    manifest.write(args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    scenario = load_scenario_file(args.config)
    settings = _settings_from(args)
    lams = np.linspace(args.lambda_min, args.lambda_max, args.samples)
    curve = coupling_sweep(scenario, lams, settings)
    write_sweep_csv(curve, args.out)
    manifest = RunManifest("sweep", args.config, [args.out],
                           {"lambda_min": args.lambda_min,
                            "lambda_max": args.lambda_max,
                            "samples": args.samples, "rel_tol": settings.rel_tol},
                           {"scenario": scenario_fingerprint(scenario),
                            "curve": curve.fingerprint}, time.perf_counter() - t0)
    manifest.write(args.out)
    print(f"wrote {args.out}; argmax capacity {curve.argmax_capacity:.6e} at "
          f"lambda_B = {curve.argmax_coupling:.4f}")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    t0 = time.perf_counter()
    scenario = load_scenario_file(args.config)
    settings = _settings_from(args)
    point = _point_from(args.point)
    result = optimize_phases(scenario, args.objective, point, budget=args.budget,
                             restarts=args.restarts, seed=args.seed,
                             settings=settings)
    lines = ["evaluation,value," + ",".join(f"theta_{i+1}"
                                            for i in range(len(result.phases)))]
    for i, (thetas, value) in enumerate(result.trace):
        lines.append(f"{i},{value:.8e}," + ",".join(f"{t:.8e}" for t in thetas))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    manifest = RunManifest("optimize", args.config, [args.out],
                           {"objective": args.objective, "point": list(point),
                            "budget": args.budget, "restarts": args.restarts,
                            "seed": args.seed, "converged": result.converged},
                           {"scenario": scenario_fingerprint(scenario)},
                           time.perf_counter() - t0)
    manifest.write(args.out)
    status = "converged" if result.converged else "budget exhausted (best-so-far)"
    print(f"{status}: value {result.value:.8e} at phases "
          + ", ".join(f"{t:.4f}" for t in result.phases)
          + f" ({result.evaluations} evaluations)")
    return EXIT_OK


def _cmd_kernels(args) -> int:
    settings = _settings_from(args)
    ks = KernelSet(args.radius, settings)
    lo, hi, count = (float(v) for v in args.r.split(","))
    rs = np.linspace(lo, hi, int(count))
    dt = float(args.dt)
    header = "r,dt,value,err_estimate"
    if args.cross_check and args.kind == "commutator":
        header += ",regulated,zero_split"
    lines = [header]
    for r in rs:
        if args.kind == "commutator":
            kv = ks.commutator_value(r, dt)
        elif args.kind == "radiation-time":
            kv = ks.radiation_time_value(r, dt)
        elif args.kind == "radiation-radial":
            kv = ks.radiation_radial_value(r, dt)
        else:
            kv = ks.vacuum_variance_value()
        line = f"{r:.8e},{dt:.8e},{kv.value:.8e},{kv.error:.8e}"
        if args.cross_check and args.kind == "commutator":
            reg = commutator_kernel_regulated(r, dt, args.radius, settings)
            zs = commutator_kernel_zero_split(r, dt, args.radius, settings)
            line += f",{reg.value:.8e},{zs.value:.8e}"
        lines.append(line)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    manifest = RunManifest("kernels", None, [args.out],
                           {"kind": args.kind, "radius": args.radius,
                            "dt": dt, "rel_tol": settings.rel_tol}, {})
    manifest.write(args.out)
    print(f"wrote {args.out} ({len(rs)} samples)")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    rows = run_standard_comparisons(tolerance=args.tolerance)
    width = max(len(r.case) for r in rows)
    print(f"{'case':<{width}}  {'pipeline':>14}  {'exact':>14}  {'|diff|':>10}  "
          f"{'tol':>8}  result")
    failures = 0
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(f"{r.case:<{width}}  {r.pipeline:>14.8e}  {r.exact:>14.8e}  "
              f"{r.difference:>10.2e}  {r.tolerance:>8.0e}  {status}")
    print(f"{len(rows) - failures}/{len(rows)} comparisons passed")
    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        if args.subcommand == "validate":
            return _cmd_validate(args)
        if args.subcommand == "energy-map":
            return _cmd_map(args, "energy")
        if args.subcommand == "capacity-map":
            return _cmd_map(args, "capacity")
        if args.subcommand == "diff":
            return _cmd_diff(args)
        if args.subcommand == "sweep":
            return _cmd_sweep(args)
        if args.subcommand == "optimize":
            return _cmd_optimize(args)
        if args.subcommand == "kernels":
            return _cmd_kernels(args)
        if args.subcommand == "oracle":
            return _cmd_oracle(args)
        parser.error(f"unknown subcommand {args.subcommand!r}")
    except (ValidationError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QuadratureError, OracleBudgetError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
