"""Grid evaluation of observables, sweeps, and phase optimization.

Maps mirror the planar scans of the study: a window in the (x, y) plane
at z = 0, energy density at the scenario's evaluation time or channel
capacity as a function of the receiver location.  Cells are independent,
so evaluation parallelizes trivially; results are identical for any
worker count because every cell is a pure function of the scenario and
quadrature settings.

CSV layout: first row is the x axis (blank corner cell), each following
row starts with its y value; numbers are printed with 9 significant
digits in scientific notation so identical runs are byte-identical.  A
JSON sidecar carries the scenario fingerprint, quantity tag, quadrature
settings, and wall time.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .kernels import QuadratureError, QuadratureSettings
from .observables import (KernelBank, ChannelPoint, channel_capacity,
                          energy_density, excitation_probability)
from .scenario import Scenario, scenario_fingerprint, w_state

__all__ = [
    "GridMap",
    "SweepCurve",
    "PhaseOptimum",
    "Window",
    "DEFAULT_WINDOW",
    "DEFAULT_RESOLUTION",
    "energy_map",
    "capacity_map",
    "diff_map",
    "coupling_sweep",
    "optimize_phases",
    "write_grid_csv",
    "read_grid_csv",
    "write_sweep_csv",
]

Window = tuple[float, float, float, float]  # (xmin, xmax, ymin, ymax)
DEFAULT_WINDOW: Window = (0.0, 16.0, 0.0, 16.0)
DEFAULT_RESOLUTION = 160
_FMT = "{:.8e}"  # 9 significant digits, locale-independent
_MAX_FAILURE_FRACTION = 1e-3


@dataclass(frozen=True)
class GridMap:
    """A 2-D scalar field sampled on an (x, y) window."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # shape (len(y), len(x)), row per y sample
    quantity: str       # energy | capacity | delta
    fingerprint: str
    meta: dict = field(default_factory=dict)
    errors: np.ndarray | None = None  # optional per-cell error estimates

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (y.size, x.size):
            raise ValueError(f"value matrix {v.shape} does not match axes "
                             f"({y.size}, {x.size})")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        for arr in (x, y, v):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "values", v)
        if self.errors is not None:
            err = np.asarray(self.errors, dtype=float)
            if err.shape != v.shape:
                raise ValueError("error matrix shape does not match values")
            err.setflags(write=False)
            object.__setattr__(self, "errors", err)


@dataclass(frozen=True)
class SweepCurve:
    """Capacity versus receiver coupling strength, with its argmax."""

    couplings: np.ndarray
    capacities: np.ndarray
    argmax_index: int
    argmax_coupling: float
    argmax_capacity: float
    fingerprint: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.couplings, dtype=float)
        cap = np.asarray(self.capacities, dtype=float)
        if lam.shape != cap.shape or lam.ndim != 1:
            raise ValueError("couplings and capacities must be equal-length vectors")
        if int(np.argmax(cap)) != self.argmax_index:
            raise ValueError("argmax index inconsistent with the data")
        lam.setflags(write=False)
        cap.setflags(write=False)
        object.__setattr__(self, "couplings", lam)
        object.__setattr__(self, "capacities", cap)


@dataclass(frozen=True)
class PhaseOptimum:
    """Best-found emitter phases for an objective; not a certified optimum."""

    phases: tuple[float, ...]
    value: float
    objective: str
    evaluations: int
    converged: bool
    restarts: int
    trace: tuple[tuple[tuple[float, ...], float], ...]


def _axes(window: Window, resolution) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(resolution, int):
        nx = ny = resolution
    else:
        nx, ny = resolution
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be >= 2 per axis")
    xmin, xmax, ymin, ymax = window
    return np.linspace(xmin, xmax, nx), np.linspace(ymin, ymax, ny)


def _run_rows(worker, ys, threads: int):
    """Map worker over y-row indices, serially or in processes."""
    if threads <= 1:
        return [worker(iy) for iy in range(len(ys))]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(len(ys)), chunksize=1))


# module-level workers so ProcessPoolExecutor can pickle them ------------

_WORK: dict = {}


def _energy_row(iy: int):
    scn, xs, ys, t, settings = (_WORK["scenario"], _WORK["xs"], _WORK["ys"],
                                _WORK["t"], _WORK["settings"])
    bank = KernelBank(settings)
    row = np.empty(xs.size)
    failures = []
    for ix, xv in enumerate(xs):
        try:
            row[ix] = energy_density(scn, (xv, ys[iy], 0.0), t, bank)
        except QuadratureError as exc:
            row[ix] = np.nan
            failures.append((ix, iy, str(exc)))
    return row, failures


def _capacity_row(iy: int):
    scn, xs, ys, settings, q = (_WORK["scenario"], _WORK["xs"], _WORK["ys"],
                                _WORK["settings"], _WORK["q"])
    bank = KernelBank(settings)
    row = np.empty(xs.size)
    failures = []
    for ix, xv in enumerate(xs):
        moved = scn.with_receiver(scn.receiver.moved_to((xv, ys[iy], 0.0)))
        try:
            p = excitation_probability(moved, couple=True, bank=bank)
            row[ix] = channel_capacity(ChannelPoint(p, q))
        except QuadratureError as exc:
            row[ix] = np.nan
            failures.append((ix, iy, str(exc)))
    return row, failures


def _collect(results, xs, ys, quantity, fingerprint, meta):
    rows, failures = [], []
    for row, fails in results:
        rows.append(row)
        failures.extend(fails)
    if len(failures) > _MAX_FAILURE_FRACTION * xs.size * ys.size:
        raise QuadratureError(
            f"{len(failures)} of {xs.size * ys.size} cells failed", math.inf, 0.0)
    values = np.vstack(rows)
    if failures:  # isolated failures are re-tried serially at a looser budget
        retry_bank = KernelBank(QuadratureSettings(rel_tol=1e-6))
        for ix, iy, _ in failures:
            values[iy, ix] = _retry_cell(quantity, ix, iy, xs, ys, retry_bank)
        meta = {**meta, "retried_cells": [[int(ix), int(iy)] for ix, iy, _ in failures]}
    return GridMap(xs, ys, values, quantity, fingerprint, meta)


def _retry_cell(quantity, ix, iy, xs, ys, bank):
    scn = _WORK["scenario"]
    if quantity == "energy":
        return energy_density(scn, (xs[ix], ys[iy], 0.0), _WORK["t"], bank)
    moved = scn.with_receiver(scn.receiver.moved_to((xs[ix], ys[iy], 0.0)))
    p = excitation_probability(moved, couple=True, bank=bank)
    return channel_capacity(ChannelPoint(p, _WORK["q"]))


def energy_map(scenario: Scenario, window: Window = DEFAULT_WINDOW,
               resolution=DEFAULT_RESOLUTION,
               settings: QuadratureSettings | None = None,
               threads: int = 1) -> GridMap:
    """Energy density over the window at the scenario's evaluation time."""
    settings = settings or QuadratureSettings()
    xs, ys = _axes(window, resolution)
    t0 = time.perf_counter()
    _WORK.update(scenario=scenario, xs=xs, ys=ys, t=scenario.evaluation_time,
                 settings=settings)
    results = _run_rows(_energy_row, ys, threads)
    meta = {"evaluation_time": scenario.evaluation_time,
            "rel_tol": settings.rel_tol,
            "wall_time_s": time.perf_counter() - t0}
    return _collect(results, xs, ys, "energy",
                    scenario_fingerprint(scenario, {"rel_tol": settings.rel_tol}), meta)


def capacity_map(scenario: Scenario, window: Window = DEFAULT_WINDOW,
                 resolution=DEFAULT_RESOLUTION,
                 settings: QuadratureSettings | None = None,
                 threads: int = 1) -> GridMap:
    """Channel capacity as a function of the receiver location over the window."""
    settings = settings or QuadratureSettings()
    xs, ys = _axes(window, resolution)
    t0 = time.perf_counter()
    bank = KernelBank(settings)
    q = excitation_probability(scenario, couple=False, bank=bank)
    _WORK.update(scenario=scenario, xs=xs, ys=ys, settings=settings, q=q)
    results = _run_rows(_capacity_row, ys, threads)
    meta = {"noise_probability": q, "rel_tol": settings.rel_tol,
            "wall_time_s": time.perf_counter() - t0}
    return _collect(results, xs, ys, "capacity",
                    scenario_fingerprint(scenario, {"rel_tol": settings.rel_tol}), meta)


def diff_map(a: GridMap, b: GridMap) -> GridMap:
    """Cellwise a - b on identical axes; tags the result as a delta map."""
    if a.x.shape != b.x.shape or a.y.shape != b.y.shape \
            or not np.array_equal(a.x, b.x) or not np.array_equal(a.y, b.y):
        raise ValueError("grid axes differ; maps are not comparable")
    if a.quantity != b.quantity:
        raise ValueError(f"cannot difference {a.quantity!r} against {b.quantity!r}")
    return GridMap(a.x, a.y, a.values - b.values, "delta",
                   a.fingerprint, {"minuend": a.fingerprint, "subtrahend": b.fingerprint,
                                   "base_quantity": a.quantity})


def coupling_sweep(scenario: Scenario, couplings,
                   settings: QuadratureSettings | None = None) -> SweepCurve:
    """Capacity at the fixed receiver location for each coupling strength."""
    lam = np.asarray(couplings, dtype=float)
    if lam.size <= 2:
        raise ValueError("a sweep needs more than 2 samples")
    if np.any(lam < 0):
        raise ValueError("coupling strengths must be >= 0")
    settings = settings or QuadratureSettings()
    bank = KernelBank(settings)
    t0 = time.perf_counter()
    caps = np.empty(lam.size)
    for i, lb in enumerate(lam):
        moved = scenario.with_receiver(scenario.receiver.with_strength(lb))
        p = excitation_probability(moved, couple=True, bank=bank)
        q = excitation_probability(moved, couple=False, bank=bank)
        caps[i] = channel_capacity(ChannelPoint(p, q))
    idx = int(np.argmax(caps))
    meta = {"rel_tol": settings.rel_tol, "wall_time_s": time.perf_counter() - t0}
    return SweepCurve(lam, caps, idx, float(lam[idx]), float(caps[idx]),
                      scenario_fingerprint(scenario, {"sweep": "lambda_B"}), meta)


# ----------------------------------------------------------------------
# derivative-free phase optimization
# ----------------------------------------------------------------------

def optimize_phases(scenario: Scenario, objective: str, point,
                    budget: int = 800, restarts: int = 4, seed: int = 0,
                    settings: QuadratureSettings | None = None) -> PhaseOptimum:
    """Search emitter phases maximizing energy or capacity at a fixed point.

    objective: "energy" (density at `point`, at the scenario evaluation
    time) or "capacity" (receiver moved to `point`).  The global-phase
    direction is removed by pinning the first phase to 0; the search runs
    Nelder-Mead from `restarts` starting points and reports the best
    evaluation found together with the full trace.
    """
    n = scenario.n_emitters
    if n < 1:
        raise ValueError("phase optimization needs at least one emitter")
    if n > 8:
        raise ValueError("dense phase search capped at 8 emitters")
    if objective not in ("energy", "capacity"):
        raise ValueError("objective must be 'energy' or 'capacity'")
    if restarts < 1:
        raise ValueError("needs at least one restart")
    settings = settings or QuadratureSettings()
    bank = KernelBank(settings)
    point = tuple(float(c) for c in point)

    trace: list[tuple[tuple[float, ...], float]] = []
    counter = {"n": 0}

    def evaluate(theta_full: np.ndarray) -> float:
        counter["n"] += 1
        scn = scenario.with_state(w_state(n, theta_full))
        if objective == "energy":
            val = energy_density(scn, point, scn.evaluation_time, bank)
        else:
            moved = scn.with_receiver(scn.receiver.moved_to(point))
            p = excitation_probability(moved, couple=True, bank=bank)
            q = excitation_probability(moved, couple=False, bank=bank)
            val = channel_capacity(ChannelPoint(p, q))
        trace.append((tuple(theta_full), val))
        return val

    if n == 1:
        # the objective is constant along the global-phase direction
        val = evaluate(np.zeros(1))
        return PhaseOptimum((0.0,), val, objective, counter["n"], True, 1,
                            tuple(trace))

    rng = np.random.default_rng(seed)
    starts = [np.zeros(n - 1)]
    while len(starts) < restarts:
        starts.append(rng.uniform(0.0, 2.0 * math.pi, n - 1))

    def negative(reduced: np.ndarray) -> float:
        full = np.concatenate(([0.0], np.mod(reduced, 2.0 * math.pi)))
        return -evaluate(full)

    best_val = -math.inf
    best_full = np.zeros(n)
    converged = True
    per_restart = max(16, budget // restarts)
    for start in starts:
        if counter["n"] >= budget:
            converged = False
            break
        res = minimize(negative, start, method="Nelder-Mead",
                       options={"maxfev": min(per_restart, budget - counter["n"]),
                                "xatol": 1e-6, "fatol": 1e-12})
        converged = converged and bool(res.success)
        if -res.fun > best_val:
            best_val = -res.fun
            best_full = np.concatenate(([0.0], np.mod(res.x, 2.0 * math.pi)))
    if counter["n"] >= budget:
        converged = False
    return PhaseOptimum(tuple(float(t) for t in best_full), float(best_val),
                        objective, counter["n"], converged, len(starts), tuple(trace))


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def write_grid_csv(grid: GridMap, path, sidecar: bool = True) -> None:
    """First row x axis, first column y axis, fixed 9-significant-digit cells."""
    lines = ["," + ",".join(_FMT.format(v) for v in grid.x)]
    for iy, yv in enumerate(grid.y):
        lines.append(_FMT.format(yv) + ","
                     + ",".join(_FMT.format(v) for v in grid.values[iy]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    if sidecar:
        side = {"quantity": grid.quantity, "fingerprint": grid.fingerprint,
                "x_range": [float(grid.x[0]), float(grid.x[-1]), int(grid.x.size)],
                "y_range": [float(grid.y[0]), float(grid.y[-1]), int(grid.y.size)],
                **grid.meta}
        with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
            json.dump(side, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_grid_csv(path) -> GridMap:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    header = rows[0].split(",")
    xs = np.array([float(v) for v in header[1:]])
    ys, values = [], []
    for line in rows[1:]:
        cells = line.split(",")
        ys.append(float(cells[0]))
        values.append([float(v) for v in cells[1:]])
    quantity, fingerprint, meta = "unknown", "", {}
    try:
        with open(_sidecar_path(path), "r", encoding="utf-8") as fh:
            side = json.load(fh)
        quantity = side.pop("quantity", "unknown")
        fingerprint = side.pop("fingerprint", "")
        side.pop("x_range", None)
        side.pop("y_range", None)
        meta = side
    except FileNotFoundError:
        pass
    return GridMap(xs, np.array(ys), np.array(values), quantity, fingerprint, meta)


def write_sweep_csv(curve: SweepCurve, path, sidecar: bool = True) -> None:
    lines = ["lambda_B,capacity"]
    for lam, cap in zip(curve.couplings, curve.capacities):
        lines.append(_FMT.format(lam) + "," + _FMT.format(cap))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    if sidecar:
        side = {"fingerprint": curve.fingerprint,
                "argmax_index": curve.argmax_index,
                "argmax_coupling": curve.argmax_coupling,
                "argmax_capacity": curve.argmax_capacity,
                **curve.meta}
        with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
            json.dump(side, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _sidecar_path(path) -> str:
    path = str(path)
    return (path[:-4] if path.endswith(".csv") else path) + ".json"
