"""Parameter sweeps, jump detection and plot-ready CSV output.

A sweep evaluates the full pipeline (propagator, quasienergies, rates,
stationary state, emission) over one or two parameter axes.  Labels are
continued sequentially along axis1 (ascending), which is cheap; the heavy
per-point work runs on a pool of independent workers and is assembled in
grid order, so output files are byte-identical for identical inputs
regardless of the worker count (set via the FLOQSPIN_WORKERS environment
variable, default: logical cores).

Discontinuities of p_0 and of the red/blue intensity ratio are flagged by
comparing each step against the local scale of neighbouring steps and are
annotated with the nearest CDT point z_k * omega.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass, fields, replace

import numpy as np

from . import analytics
from ._core import BACKEND
from .bath import fourier_coefficients, rates
from .errors import ConfigError, DomainError, FloqspinError
from .floquet import (DEFAULT_N_STEPS, FloquetSolution, continue_labels,
                      floquet_solution)
from .model import BathParams, SystemParams
from .stationary import emission, solve_stationary

SYSTEM_AXES = ("h_x", "h_z0", "h_z1", "omega", "theta")
BATH_AXES = ("gamma", "omega_c", "temperature")
#: axes that change the Floquet solution (not just the rate stage)
SOLUTION_AXES = ("h_x", "h_z0", "h_z1", "omega")

OUTPUT_GROUPS = ("spectrum", "populations", "coefficients", "emission",
                 "analytic")

DEFAULT_JUMP_THRESHOLD_P0 = 0.05
DEFAULT_JUMP_THRESHOLD_RATIO = 0.02

_FLOAT_FORMAT = ".17g"


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: parameter name, inclusive range, sample count."""

    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in SYSTEM_AXES + BATH_AXES:
            raise ConfigError(f"unknown sweep axis {self.name!r}")
        if self.points < 2:
            raise ConfigError("an axis needs at least 2 samples")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("axis range must be finite")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """Declarative sweep description."""

    system: SystemParams
    bath: BathParams
    axis1: AxisSpec
    axis2: AxisSpec | None = None
    outputs: tuple[str, ...] = ("spectrum", "populations", "coefficients",
                                "emission")
    n_steps: int = DEFAULT_N_STEPS
    n_max: int = 3
    jump_threshold_p0: float = DEFAULT_JUMP_THRESHOLD_P0
    jump_threshold_ratio: float = DEFAULT_JUMP_THRESHOLD_RATIO

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ConfigError("axis1 and axis2 must be distinct parameters")
        for group in self.outputs:
            if group not in OUTPUT_GROUPS:
                raise ConfigError(f"unknown output group {group!r}")


@dataclass(frozen=True)
class PointResult:
    """Full result record for one parameter point."""

    system: SystemParams
    bath: BathParams
    eps0: float
    eps1: float
    gap: float
    degenerate: bool
    p0: float = math.nan
    p1: float = math.nan
    w_01: float = math.nan
    w_10: float = math.nan
    a2_nm1_10: float = math.nan
    a2_nm1_01: float = math.nan
    i_blue: float = math.nan
    i_red: float = math.nan
    i_unshifted: float = math.nan
    ratio: float = math.nan
    ratio_defined: bool = False
    eps0_hf: float = math.nan
    eps1_hf: float = math.nan
    gap_hf: float = math.nan
    a2_nm1_10_hf: float = math.nan
    a2_nm1_01_hf: float = math.nan
    swapped: bool = False

    def value(self, column: str) -> float:
        return _COLUMN_GETTERS[column](self)


@dataclass(frozen=True)
class JumpRecord:
    """A detected discontinuity in a swept observable series."""

    observable: str
    location: float
    left_value: float
    right_value: float
    magnitude: float
    nearest_root: float = math.nan       # z_k * omega, when axis is h_z1
    root_relative_distance: float = math.nan
    root_index: int = 0
    axis2_value: float = math.nan


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    columns: tuple[str, ...]
    records: list  # PointResult or None per grid point, axis1 fastest
    jumps: list
    failures: list  # (grid index, message)


_COLUMN_GETTERS = {
    "h_z1": lambda r: r.system.h_z1,
    "theta": lambda r: r.system.theta,
    "h_x": lambda r: r.system.h_x,
    "h_z0": lambda r: r.system.h_z0,
    "omega": lambda r: r.system.omega,
    "gamma": lambda r: r.bath.gamma,
    "omega_c": lambda r: r.bath.omega_c,
    "temperature": lambda r: r.bath.temperature,
    "eps0": lambda r: r.eps0,
    "eps1": lambda r: r.eps1,
    "gap": lambda r: r.gap,
    "p0": lambda r: r.p0,
    "p1": lambda r: r.p1,
    "a2_n-1_10": lambda r: r.a2_nm1_10,
    "a2_n-1_01": lambda r: r.a2_nm1_01,
    "I_b": lambda r: r.i_blue,
    "I_r": lambda r: r.i_red,
    "I_0": lambda r: r.i_unshifted,
    "ratio": lambda r: r.ratio,
    "degenerate": lambda r: float(r.degenerate),
    "swapped": lambda r: float(r.swapped),
    "w_01": lambda r: r.w_01,
    "w_10": lambda r: r.w_10,
    "eps0_hf": lambda r: r.eps0_hf,
    "eps1_hf": lambda r: r.eps1_hf,
    "gap_hf": lambda r: r.gap_hf,
    "a2_n-1_10_hf": lambda r: r.a2_nm1_10_hf,
    "a2_n-1_01_hf": lambda r: r.a2_nm1_01_hf,
}

_GROUP_COLUMNS = {
    "spectrum": ("eps0", "eps1", "gap"),
    "populations": ("p0", "p1"),
    "coefficients": ("a2_n-1_10", "a2_n-1_01"),
    "emission": ("I_b", "I_r", "I_0", "ratio"),
    "analytic": ("eps0_hf", "eps1_hf", "gap_hf", "a2_n-1_10_hf",
                 "a2_n-1_01_hf"),
}


def result_columns(outputs: tuple[str, ...]) -> tuple[str, ...]:
    """CSV column set for the selected output groups, in schema order."""
    cols = ["h_z1", "theta"]
    for group in ("spectrum", "populations", "coefficients", "emission"):
        if group in outputs:
            cols.extend(_GROUP_COLUMNS[group])
    cols.extend(["degenerate", "swapped"])
    if "populations" in outputs:
        cols.extend(["w_01", "w_10"])
    if "analytic" in outputs:
        cols.extend(_GROUP_COLUMNS["analytic"])
    return tuple(cols)


def _compute_point(solution: FloquetSolution, system: SystemParams,
                   bath: BathParams, n_max: int, include_analytic: bool,
                   include_rates: bool = True) -> PointResult:
    record = PointResult(
        system=system, bath=bath,
        eps0=float(solution.quasienergies[0]),
        eps1=float(solution.quasienergies[1]),
        gap=solution.gap, degenerate=solution.degenerate,
        swapped=bool(solution.swapped_from_previous))

    if include_rates:
        table = rates(fourier_coefficients(solution, system.theta, n_max),
                      bath, solution)
        state = solve_stationary(table)
        report = emission(state, table, solution)
        record = replace(
            record,
            p0=state.p0, p1=state.p1,
            w_01=table.total(0, 1), w_10=table.total(1, 0),
            a2_nm1_10=abs(table.a(-1, 1, 0)) ** 2,
            a2_nm1_01=abs(table.a(-1, 0, 1)) ** 2,
            i_blue=report.intensity_blue, i_red=report.intensity_red,
            i_unshifted=report.intensity_unshifted,
            ratio=report.ratio, ratio_defined=report.ratio_defined)

    if include_analytic:
        heff = analytics.effective_hamiltonian(system)
        table_hf = analytics.analytic_transition_elements(system, -1)
        record = replace(
            record,
            eps0_hf=float(heff.quasienergies[0]),
            eps1_hf=float(heff.quasienergies[1]),
            gap_hf=heff.gap,
            a2_nm1_10_hf=abs(table_hf[1, 0]) ** 2,
            a2_nm1_01_hf=abs(table_hf[0, 1]) ** 2)
    return record


def run_point(system: SystemParams, bath: BathParams, *,
              n_steps: int = DEFAULT_N_STEPS, n_max: int = 3,
              include_analytic: bool = False,
              backend: str | None = None,
              solution: FloquetSolution | None = None) -> PointResult:
    """Evaluate the full pipeline at a single parameter point."""
    if solution is None:
        solution = floquet_solution(system, n_steps, backend)
    return _compute_point(solution, system, bath, n_max, include_analytic)


def _with_axis(system: SystemParams, bath: BathParams, name: str,
               value: float) -> tuple[SystemParams, BathParams]:
    if name in SYSTEM_AXES:
        return system.replace(**{name: value}), bath
    return system, bath.replace(**{name: value})


def _group_worker(task):
    """Evaluate one group of points sharing a Floquet solution."""
    solution, items, n_max, include_analytic, include_rates = task
    out = []
    for idx, system, bath in items:
        try:
            out.append((idx, _compute_point(solution, system, bath, n_max,
                                            include_analytic,
                                            include_rates)))
        except FloqspinError as exc:
            out.append((idx, f"{type(exc).__name__}: {exc}"))
    return out


def worker_count() -> int:
    env = os.environ.get("FLOQSPIN_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate a sweep grid; axis1 varies fastest in the record order.

    Labels are continued sequentially along axis1 whenever axis1 changes the
    Floquet solution; the heavy rate-stage work is distributed over a worker
    pool and reassembled in grid order.
    """
    if workers is None:
        workers = worker_count()
    values1 = spec.axis1.values()
    values2 = spec.axis2.values() if spec.axis2 else np.array([math.nan])
    axis2_name = spec.axis2.name if spec.axis2 else None
    include_analytic = "analytic" in spec.outputs
    # quasienergy-only sweeps skip the whole rate stage (fast path)
    include_rates = any(g in spec.outputs for g in
                        ("populations", "coefficients", "emission"))

    axis1_solution = spec.axis1.name in SOLUTION_AXES
    axis2_solution = axis2_name in SOLUTION_AXES if axis2_name else False

    n1, n2 = len(values1), len(values2)
    records: list = [None] * (n1 * n2)
    failures: list = []

    def labeled_row(base_system: SystemParams) -> list[FloquetSolution]:
        """Sequential axis1 pass: solve and continue labels along the row."""
        if not axis1_solution:  # axis1 only touches the rate stage
            return [floquet_solution(base_system, spec.n_steps)] * n1
        row = []
        previous = None
        for v1 in values1:
            system, _ = _with_axis(base_system, spec.bath, spec.axis1.name, v1)
            sol = floquet_solution(system, spec.n_steps)
            if previous is not None:
                sol = continue_labels(previous, sol)
            previous = sol
            row.append(sol)
        return row

    tasks = []
    if not axis2_solution:
        # one labeling pass; solutions shared across axis2 (e.g. theta maps)
        base_system, base_bath = spec.system, spec.bath
        row = labeled_row(base_system)
        for i1, v1 in enumerate(values1):
            items = []
            for i2, v2 in enumerate(values2):
                system, bath = _with_axis(base_system, base_bath,
                                          spec.axis1.name, v1)
                if axis2_name:
                    system, bath = _with_axis(system, bath, axis2_name, v2)
                items.append((i2 * n1 + i1, system, bath))
            tasks.append((row[i1], items, spec.n_max, include_analytic,
                          include_rates))
    else:
        for i2, v2 in enumerate(values2):
            base_system, base_bath = _with_axis(spec.system, spec.bath,
                                                axis2_name, v2)
            row = labeled_row(base_system)
            for i1, v1 in enumerate(values1):
                system, bath = _with_axis(base_system, base_bath,
                                          spec.axis1.name, v1)
                tasks.append((row[i1], [(i2 * n1 + i1, system, bath)],
                              spec.n_max, include_analytic, include_rates))

    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(workers) as pool:
            chunks = pool.map(_group_worker, tasks, chunksize=1)
    else:
        chunks = [_group_worker(t) for t in tasks]

    for chunk in chunks:
        for idx, payload in chunk:
            if isinstance(payload, str):
                failures.append((idx, payload))
            else:
                records[idx] = payload
    failures.sort()

    jumps = _detect_sweep_jumps(spec, values1, values2, records)
    return SweepResult(spec=spec, columns=result_columns(spec.outputs),
                       records=records, jumps=jumps, failures=failures)


def _detect_sweep_jumps(spec, values1, values2, records):
    jumps = []
    n1 = len(values1)
    omega = spec.system.omega
    axis_is_hz1 = spec.axis1.name == "h_z1"
    for i2, v2 in enumerate(values2):
        row = records[i2 * n1:(i2 + 1) * n1]
        if n1 < 8:
            continue
        for observable, threshold in (("p0", spec.jump_threshold_p0),
                                      ("ratio", spec.jump_threshold_ratio)):
            ys = np.array([r.value(observable) if r is not None else math.nan
                           for r in row])
            found = detect_jumps(values1, ys, threshold,
                                 observable=observable,
                                 omega=omega if axis_is_hz1 else None)
            if spec.axis2 is not None:
                found = [replace(j, axis2_value=float(v2)) for j in found]
            jumps.extend(found)
    return jumps


def detect_jumps(xs, ys, threshold: float, *, observable: str = "",
                 omega: float | None = None) -> list[JumpRecord]:
    """Flag steps larger than threshold plus five times the local step scale.

    The local scale is the median |dy| of the six nearest non-flagged steps.
    Left/right values are taken one point away from the flagged step, and
    when the series axis is a drive amplitude (omega given) each record is
    annotated with the nearest CDT point z_k * omega.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 8:
        raise DomainError("jump detection needs at least 8 points")
    if len(xs) != len(ys):
        raise ConfigError("jump detection needs equal-length series")

    dy = np.abs(np.diff(ys))
    valid = np.isfinite(dy)
    if not valid.any():
        return []
    global_med = float(np.median(dy[valid]))
    provisional = valid & (dy > threshold + 5.0 * global_med)

    def local_median(i: int) -> float:
        order = np.argsort(np.abs(np.arange(len(dy)) - i), kind="stable")
        picked = []
        for j in order:
            if j == i or provisional[j] or not valid[j]:
                continue
            picked.append(dy[j])
            if len(picked) == 6:
                break
        return float(np.median(picked)) if picked else global_med

    records = []
    for i in np.flatnonzero(provisional):
        if dy[i] <= threshold + 5.0 * local_median(i):
            continue
        left = ys[i - 1] if i >= 1 and np.isfinite(ys[i - 1]) else ys[i]
        right = ys[i + 2] if i + 2 < len(ys) and np.isfinite(ys[i + 2]) \
            else ys[i + 1]
        magnitude = abs(right - left)
        if magnitude < threshold:
            continue
        location = 0.5 * (xs[i] + xs[i + 1])
        root_x = math.nan
        rel = math.nan
        k = 0
        if omega is not None and location > 0:
            k, z_k = analytics.nearest_cdt_root(location / omega)
            root_x = z_k * omega
            rel = abs(location - root_x) / root_x
        records.append(JumpRecord(observable=observable,
                                  location=float(location),
                                  left_value=float(left),
                                  right_value=float(right),
                                  magnitude=float(magnitude),
                                  nearest_root=root_x,
                                  root_relative_distance=rel,
                                  root_index=k))
    return records


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    return format(float(value), _FLOAT_FORMAT)


def write_csv(result: SweepResult, path) -> None:
    """Write sweep records as CSV: 17 significant digits, '\\n' endings."""
    lines = [",".join(result.columns)]
    for record in result.records:
        if record is None:
            continue
        lines.append(",".join(_fmt(record.value(c)) for c in result.columns))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_metadata(result: SweepResult, path) -> None:
    """Key=value sidecar: all parameters, tool version, grid sizes, jumps."""
    from . import __version__

    spec = result.spec
    pairs = [("tool", "floqspin"), ("version", __version__),
             ("backend", BACKEND)]
    for f in fields(spec.system):
        pairs.append((f"system.{f.name}", _fmt(getattr(spec.system, f.name))))
    for f in fields(spec.bath):
        pairs.append((f"bath.{f.name}", _fmt(getattr(spec.bath, f.name))))
    for label, axis in (("axis1", spec.axis1), ("axis2", spec.axis2)):
        if axis is None:
            continue
        pairs.extend([(f"sweep.{label}", axis.name),
                      (f"sweep.{label}_start", _fmt(axis.start)),
                      (f"sweep.{label}_stop", _fmt(axis.stop)),
                      (f"sweep.{label}_points", str(axis.points))])
    pairs.extend([("sweep.n_steps", str(spec.n_steps)),
                  ("sweep.n_max", str(spec.n_max)),
                  ("sweep.outputs", ",".join(spec.outputs)),
                  ("sweep.jump_threshold_p0", _fmt(spec.jump_threshold_p0)),
                  ("sweep.jump_threshold_ratio",
                   _fmt(spec.jump_threshold_ratio)),
                  ("emission.I_0_definition",
                   "diagonal-channel extension (not part of the sideband pair)"),
                  ("records.total", str(len(result.records))),
                  ("records.failed", str(len(result.failures)))])
    for i, jump in enumerate(result.jumps):
        prefix = f"jump.{i}"
        pairs.extend([
            (f"{prefix}.observable", jump.observable),
            (f"{prefix}.location", _fmt(jump.location)),
            (f"{prefix}.left", _fmt(jump.left_value)),
            (f"{prefix}.right", _fmt(jump.right_value)),
            (f"{prefix}.magnitude", _fmt(jump.magnitude)),
            (f"{prefix}.nearest_root", _fmt(jump.nearest_root)),
            (f"{prefix}.root_relative_distance",
             _fmt(jump.root_relative_distance)),
            (f"{prefix}.axis2_value", _fmt(jump.axis2_value)),
        ])
    for idx, message in result.failures:
        pairs.append((f"failure.{idx}", message))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("\n".join(f"{k}={v}" for k, v in pairs) + "\n")
