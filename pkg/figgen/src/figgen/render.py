"""Log-log figures from solver result CSVs.

Input is the experiment harness's CSV interface (fixed 12-column header,
optional trailing `note` column).  Convergence figures plot error against the
time step, viscosity figures plot the difference against the viscosity; every
series present in the file is drawn unmodified, plus a dashed slope-1
reference line.  Output is SVG by default, raster formats by file extension.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_FIELDS = [
    "experiment", "nu", "tau", "n_points", "N", "T",
    "err_L2", "err_B0inf1", "err_B0inf2",
    "picard_mean_iters", "stability_flag", "wall_seconds",
]
ERROR_COLUMNS = [
    ("err_L2", "$L^2$"),
    ("err_B0inf1", r"$B^0_{\infty,1}$"),
    ("err_B0inf2", r"$B^0_{\infty,2}$"),
]
KINDS = ("convergence", "viscosity")

# deterministic SVG output: fixed hash salt, no timestamp metadata
matplotlib.rcParams["svg.hashsalt"] = "figgen"


class SchemaError(ValueError):
    """CSV header or row does not match the result-file interface."""


class EmptyInputError(ValueError):
    """CSV has no data rows to plot."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    kind: str
    output_path: str
    reference_slope: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"kind must be one of {KINDS}, got {self.kind!r}")


def _read_rows(path: Path):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: file is empty, expected the result header")
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    for want, got in zip(CSV_FIELDS, header):
        if want != got:
            raise SchemaError(f"{path}: expected column {want!r}, found {got!r}")
    if len(header) < len(CSV_FIELDS):
        raise SchemaError(
            f"{path}: expected column {CSV_FIELDS[len(header)]!r}, header ends early"
        )
    if len(header) > len(CSV_FIELDS) and header[len(CSV_FIELDS)] != "note":
        raise SchemaError(
            f"{path}: unexpected column {header[len(CSV_FIELDS)]!r}"
        )
    return header, rows


def _parse_float(path, column, raw):
    try:
        return float(raw)
    except ValueError as exc:
        raise SchemaError(f"{path}: bad value {raw!r} in column {column!r}") from exc


def load_series(path: Path, kind: str):
    """Returns (x_values, {column: y_values}, group_labels) for plotting."""
    header, raw_rows = _read_rows(path)
    x_col = "tau" if kind == "convergence" else "nu"
    idx = {name: header.index(name) for name in CSV_FIELDS}
    points = []
    for row in raw_rows:
        if not row:
            continue
        if len(row) != len(header):
            raise SchemaError(
                f"{path}: row has {len(row)} fields, header has {len(header)}"
            )
        errs = {}
        for col, _ in ERROR_COLUMNS:
            raw = row[idx[col]]
            errs[col] = _parse_float(path, col, raw) if raw != "" else None
        points.append(
            (
                _parse_float(path, "nu", row[idx["nu"]]),
                _parse_float(path, x_col, row[idx[x_col]]),
                errs,
            )
        )
    points = [p for p in points if any(v is not None for v in p[2].values())]
    if not points:
        raise EmptyInputError(f"{path}: no data rows to plot")
    return points


def render(spec: FigureSpec) -> Path:
    """Draw the figure; the output file appears only on success."""
    path = Path(spec.input_csv)
    points = load_series(path, spec.kind)
    x_label = r"time step $\tau$" if spec.kind == "convergence" else r"viscosity $\nu$"
    y_label = "error" if spec.kind == "convergence" else "difference"

    groups = sorted({nu for nu, _, _ in points}) if spec.kind == "convergence" else [None]
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    all_x, all_y = [], []
    for group in groups:
        sel = [p for p in points if group is None or p[0] == group]
        xs = [x for _, x, _ in sel]
        for col, pretty in ERROR_COLUMNS:
            ys = [errs[col] for _, _, errs in sel]
            if any(y is None for y in ys) or not ys:
                continue
            label = pretty if group is None or len(groups) == 1 else f"{pretty}, $\\nu$={group:g}"
            ax.loglog(xs, ys, marker="o", linestyle="-", label=label)
            all_x.extend(xs)
            all_y.extend(ys)
    if not all_y:
        plt.close(fig)
        raise EmptyInputError(f"{path}: error columns are empty")
    if spec.reference_slope:
        x0, x1 = min(all_x), max(all_x)
        anchor = min(all_y)
        ax.loglog(
            [x0, x1],
            [anchor, anchor * (x1 / x0)],
            linestyle="--",
            color="gray",
            label="slope 1",
        )
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.output_path)
    try:
        fig.savefig(out, metadata=_metadata_for(out))
    finally:
        plt.close(fig)
    return out


def _metadata_for(out: Path):
    # strip volatile timestamps so identical inputs give identical bytes
    suffix = out.suffix.lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": None}
    return None


def fitted_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x (for verification)."""
    import numpy as np

    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
