"""Experiment harness: parameter sweeps, result rows, CSV persistence.

Three experiment kinds:

* converge  -- forced viscous runs to T against the exact solution over a
               (nu, tau) lattice; tau halves `halvings` times per nu,
* viscosity -- inviscid-forcing runs with decreasing viscosity at fixed tau,
               measuring the O(nu) drift from the inviscid exact solution,
* stability -- unforced Taylor-Green runs recording the worst ratio
               max_n ||u^n|| / ||u^0|| in the B^1_{inf,1} monitor norm.

Cells are independent simulations and run on a small thread pool; rows are
emitted in request order regardless of completion order.  Forcing is sampled at
the start of each step (forcing_time="step_start") -- the placement that
reproduces the reference convergence tables.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DataError, NonConvergenceError
from .manufactured import (
    ManufacturedCase,
    error_report,
    exact_solution,
    forcing_provider,
    taylor_green_shape,
)
from .solver import STABILITY_FACTOR, SolverConfig, run_simulation
from .spectral import Grid2D

CSV_HEADER = (
    "experiment,nu,tau,n_points,N,T,err_L2,err_B0inf1,err_B0inf2,"
    "picard_mean_iters,stability_flag,wall_seconds"
)
CSV_FIELDS = CSV_HEADER.split(",")

DEFAULT_CONVERGE_NUS = (1.0, 0.1, 0.01, 1e-5)
DEFAULT_FORCING_TIME = "step_start"


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    nu_list: tuple = DEFAULT_CONVERGE_NUS
    tau_base: float = 0.01
    halvings: int = 5
    T: float = 2.0
    n_points: int = 64
    N: int = 21
    picard_tol: float = 1e-12
    picard_max: int = 100
    out_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("converge", "viscosity", "stability", "selftest"):
            raise ConfigurationError(f"unknown experiment kind {self.kind!r}")
        if self.halvings < 0:
            raise ConfigurationError("halvings must be >= 0")
        if not self.nu_list:
            raise ConfigurationError("need at least one viscosity")
        if any(nu < 0 for nu in self.nu_list):
            raise ConfigurationError("viscosities must be >= 0")
        for tau in self.tau_values():
            ratio = self.T / tau
            if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                raise ConfigurationError(
                    f"tau={tau!r} does not divide T={self.T!r} into whole steps"
                )

    def tau_values(self):
        if self.kind == "viscosity":
            return (self.tau_base,)
        return tuple(self.tau_base / 2**i for i in range(self.halvings + 1))

    def nu_values(self):
        if self.kind == "viscosity":
            base = self.nu_list[0]
            return tuple(base / 2**i for i in range(self.halvings + 1))
        return tuple(self.nu_list)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    nu: float
    tau: float
    n_points: int
    N: int
    T: float
    err_L2: Optional[float]
    err_B0inf1: Optional[float]
    err_B0inf2: Optional[float]
    picard_mean_iters: Optional[float]
    stability_flag: Optional[bool]
    wall_seconds: float
    note: str = ""

    def __post_init__(self):
        for v in (self.err_L2, self.err_B0inf1, self.err_B0inf2):
            if v is not None and not (math.isfinite(v) and v >= 0):
                raise DataError(f"error value {v!r} is not a finite non-negative number")


def _solver_config(spec: ExperimentSpec, nu: float, tau: float, forcing) -> SolverConfig:
    return SolverConfig(
        nu=nu,
        tau=tau,
        T=spec.T,
        n_points=spec.n_points,
        N=spec.N,
        picard_tol=spec.picard_tol,
        picard_max=spec.picard_max,
        forcing=forcing,
        forcing_time=DEFAULT_FORCING_TIME,
    )


def _mean_iters(traj) -> float:
    return float(np.mean([d.picard_iters for d in traj.diagnostics]))


def _run_cell(spec: ExperimentSpec, nu: float, tau: float):
    """One sweep cell; returns a ResultRow, catching solver failures."""
    started = time.perf_counter()
    grid = Grid2D(spec.n_points)
    try:
        if spec.kind == "converge":
            case = ManufacturedCase("ns_forced", nu=nu)
            compare_at = spec.T
        elif spec.kind == "viscosity":
            case = ManufacturedCase("euler_forced")
            compare_at = spec.T
        else:
            raise ConfigurationError(f"no cell runner for kind {spec.kind!r}")
        cfg = _solver_config(spec, nu, tau, forcing_provider(case))
        traj = run_simulation(exact_solution(0.0, grid), cfg)
        rep = error_report(traj.final(), compare_at)
        return ResultRow(
            experiment=spec.kind,
            nu=nu,
            tau=tau,
            n_points=spec.n_points,
            N=spec.N,
            T=spec.T,
            err_L2=rep.err_L2,
            err_B0inf1=rep.err_B0_inf_1,
            err_B0inf2=rep.err_B0_inf_2,
            picard_mean_iters=_mean_iters(traj),
            stability_flag=traj.stability_violated,
            wall_seconds=time.perf_counter() - started,
        )
    except (ConfigurationError, DataError, NonConvergenceError) as exc:
        return ResultRow(
            experiment=spec.kind,
            nu=nu,
            tau=tau,
            n_points=spec.n_points,
            N=spec.N,
            T=spec.T,
            err_L2=None,
            err_B0inf1=None,
            err_B0inf2=None,
            picard_mean_iters=None,
            stability_flag=None,
            wall_seconds=time.perf_counter() - started,
            note=f"{type(exc).__name__}: {exc}",
        )


def _run_cells(spec: ExperimentSpec, cells):
    workers = max(1, min(len(cells), os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: _run_cell(spec, *c), cells))


def convergence_sweep(spec: ExperimentSpec):
    """Rows for every (nu, tau) cell of the forced convergence lattice."""
    if spec.kind != "converge":
        raise ConfigurationError("convergence_sweep needs kind='converge'")
    cells = [(nu, tau) for nu in spec.nu_values() for tau in spec.tau_values()]
    return _run_cells(spec, cells)


def viscosity_sweep(spec: ExperimentSpec):
    """Rows for the vanishing-viscosity ladder at fixed tau."""
    if spec.kind != "viscosity":
        raise ConfigurationError("viscosity_sweep needs kind='viscosity'")
    cells = [(nu, spec.tau_base) for nu in spec.nu_values()]
    return _run_cells(spec, cells)


# ---------------------------------------------------------------------------
# stability monitor experiment


@dataclass(frozen=True)
class StabilityEntry:
    nu: float
    tau: float
    max_ratio: float
    within_bound: bool  # the 8x monitor ceiling
    note: str = ""


@dataclass(frozen=True)
class StabilityReport:
    entries: tuple
    rows: tuple  # ResultRows (errors vs the exact viscous decay)

    @property
    def all_within_bound(self) -> bool:
        return all(e.within_bound for e in self.entries if not e.note)


def _stability_cell(spec: ExperimentSpec, nu: float, tau: float):
    started = time.perf_counter()
    grid = Grid2D(spec.n_points)
    try:
        cfg = _solver_config(spec, nu, tau, None)
        traj = run_simulation(taylor_green_shape(grid), cfg)
        ratio = traj.max_monitor_ratio()
        # unforced Taylor-Green decays exactly like e^{-2 nu t}
        exact = taylor_green_shape(grid, 0.5 * math.exp(-2.0 * nu * spec.T))
        diff = traj.final() - exact
        from .littlewood_paley import BesovIndex, besov_norm
        from .spectral import l2_norm

        row = ResultRow(
            experiment="stability",
            nu=nu,
            tau=tau,
            n_points=spec.n_points,
            N=spec.N,
            T=spec.T,
            err_L2=l2_norm(diff),
            err_B0inf1=besov_norm(diff, BesovIndex(0.0, math.inf, 1)),
            err_B0inf2=besov_norm(diff, BesovIndex(0.0, math.inf, 2)),
            picard_mean_iters=_mean_iters(traj),
            stability_flag=traj.stability_violated,
            wall_seconds=time.perf_counter() - started,
        )
        entry = StabilityEntry(nu, tau, ratio, ratio <= STABILITY_FACTOR)
        return entry, row
    except (ConfigurationError, DataError, NonConvergenceError) as exc:
        note = f"{type(exc).__name__}: {exc}"
        row = ResultRow(
            experiment="stability",
            nu=nu,
            tau=tau,
            n_points=spec.n_points,
            N=spec.N,
            T=spec.T,
            err_L2=None,
            err_B0inf1=None,
            err_B0inf2=None,
            picard_mean_iters=None,
            stability_flag=None,
            wall_seconds=time.perf_counter() - started,
            note=note,
        )
        return StabilityEntry(nu, tau, math.nan, False, note), row


def stability_check(spec: ExperimentSpec) -> StabilityReport:
    """Unforced runs over the sweep; reports max_n ||u^n|| / ||u^0||."""
    if spec.kind != "stability":
        raise ConfigurationError("stability_check needs kind='stability'")
    cells = [(nu, tau) for nu in spec.nu_values() for tau in spec.tau_values()]
    workers = max(1, min(len(cells), os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda c: _stability_cell(spec, *c), cells))
    return StabilityReport(
        entries=tuple(r[0] for r in results), rows=tuple(r[1] for r in results)
    )


# ---------------------------------------------------------------------------
# CSV persistence


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, float):
        return repr(v)  # shortest round-trip decimal
    return str(v)


def emit_csv(rows, path) -> None:
    """Write rows under the fixed schema; a trailing `note` column appears
    only when some cell failed (keeps the success-path output bit-stable)."""
    path = Path(path)
    with_note = any(r.note for r in rows)
    header = CSV_HEADER + (",note" if with_note else "")
    lines = [header]
    for r in rows:
        vals = [
            r.experiment,
            _format_value(r.nu),
            _format_value(r.tau),
            _format_value(r.n_points),
            _format_value(r.N),
            _format_value(r.T),
            _format_value(r.err_L2),
            _format_value(r.err_B0inf1),
            _format_value(r.err_B0inf2),
            _format_value(r.picard_mean_iters),
            _format_value(r.stability_flag),
            _format_value(r.wall_seconds),
        ]
        if with_note:
            vals.append(r.note)
        lines.append(",".join(vals))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def _parse_value(field_name: str, raw: str):
    if raw == "":
        return None
    if field_name == "experiment":
        return raw
    if field_name in ("n_points", "N"):
        return int(raw)
    if field_name == "stability_flag":
        if raw not in ("True", "False"):
            raise DataError(f"bad boolean {raw!r} in column stability_flag")
        return raw == "True"
    return float(raw)


def read_csv(path):
    """Parse a results file back into ResultRows (roundtrip-exact)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="ascii").splitlines()
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    if not lines:
        raise DataError(f"{path}: empty results file")
    header = lines[0].split(",")
    if header[: len(CSV_FIELDS)] != CSV_FIELDS:
        for want, got in zip(CSV_FIELDS, header):
            if want != got:
                raise DataError(f"{path}: expected column {want!r}, found {got!r}")
        raise DataError(f"{path}: truncated header")
    has_note = len(header) == len(CSV_FIELDS) + 1 and header[-1] == "note"
    if len(header) != len(CSV_FIELDS) + (1 if has_note else 0):
        raise DataError(f"{path}: unexpected columns {header[len(CSV_FIELDS):]}")
    rows = []
    for ln in lines[1:]:
        if not ln:
            continue
        parts = ln.split(",")
        if len(parts) != len(header):
            raise DataError(f"{path}: row has {len(parts)} fields, expected {len(header)}")
        kwargs = {
            name: _parse_value(name, raw) for name, raw in zip(CSV_FIELDS, parts)
        }
        kwargs["note"] = parts[len(CSV_FIELDS)] if has_note else ""
        rows.append(ResultRow(**kwargs))
    return rows
