"""Rendering of sweep CSV tables: heatmaps, line cuts, categorical region maps.

Display only: numeric values pass straight from the CSV to the canvas.
"NaN" cells (unstable or failed grid points) render as blank white, and
categorical columns (region / directionality codes) use a discrete palette.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import BoundaryNorm, ListedColormap

KINDS = ("heatmap", "lines", "regionmap")

#: categorical palette; directionality maps use the first four entries
REGION_COLORS = ("#bdbdbd", "#f4a6b8", "#9ecae1", "#a1d99b",
                 "#fdd0a2", "#bcbddc", "#fee391", "#d9d9d9")


class FigplotsError(ValueError):
    """Bad plot job: missing column, malformed grid, unreadable input."""


@dataclass
class PlotJob:
    """One rendering task from a CSV table to a PNG file."""

    input_csv: str
    kind: str
    x: str
    y: str | None = None
    z: str | None = None
    out: str = "plot.png"
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    dpi: int = 150
    figsize: tuple = (6.4, 4.8)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigplotsError(f"unknown kind {self.kind!r}; expected one of {KINDS}")


def load_table(path) -> dict[str, np.ndarray]:
    """Read a sweep CSV into named columns.

    Numeric fields parse to float ("NaN" to nan, booleans to 0/1); columns
    with any non-numeric text stay as string arrays.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FigplotsError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise FigplotsError(f"{path} has no data rows")
    header, data = rows[0], rows[1:]
    table = {}
    for j, name in enumerate(header):
        raw = [row[j] for row in data]
        values = np.empty(len(raw))
        numeric = True
        for i, cell in enumerate(raw):
            if cell == "true":
                values[i] = 1.0
            elif cell == "false":
                values[i] = 0.0
            else:
                try:
                    values[i] = float(cell)   # float("NaN") handles sentinels
                except ValueError:
                    numeric = False
                    break
        table[name] = values if numeric else np.array(raw, dtype=object)
    return table


def _column(table: dict, name: str) -> np.ndarray:
    if name not in table:
        raise FigplotsError(
            f"no column {name!r}; available columns: {', '.join(table)}")
    col = table[name]
    if col.dtype == object:
        raise FigplotsError(f"column {name!r} is not numeric")
    return col


def _grid_axes(table: dict, x: str, y: str):
    """Recover the rectangular row-major grid behind two axis columns."""
    xs = _column(table, x)
    ys = _column(table, y)
    ux = np.unique(xs)
    uy = np.unique(ys)
    if len(ux) * len(uy) != len(xs):
        raise FigplotsError(
            f"columns {x!r}, {y!r} do not form a complete rectangular grid "
            f"({len(ux)} x {len(uy)} values for {len(xs)} rows)")
    expect_x = np.repeat(ux, len(uy))
    expect_y = np.tile(uy, len(ux))
    if not (np.array_equal(xs, expect_x) and np.array_equal(ys, expect_y)):
        raise FigplotsError(
            f"rows are not in row-major order over ({x!r}, {y!r})")
    return ux, uy


def discrete_categories(values: np.ndarray) -> list[int]:
    """Sorted distinct integer codes present in a categorical column."""
    finite = values[np.isfinite(values)]
    cats = sorted({int(round(v)) for v in finite})
    if any(abs(v - round(v)) > 1e-9 for v in finite):
        raise FigplotsError("region-map column holds non-integer values")
    return cats


def build_figure(job: PlotJob, table: dict | None = None):
    """Assemble the matplotlib figure of a job (no file output)."""
    if table is None:
        table = load_table(job.input_csv)

    fig, ax = plt.subplots(figsize=job.figsize)
    if job.kind == "lines":
        xs = _column(table, job.x)
        names = [n.strip() for n in (job.y or "").split(",") if n.strip()]
        if not names:
            raise FigplotsError("kind=lines needs --y <col>[,<col>...]")
        for name in names:
            ax.plot(xs, _column(table, name), label=name)
        ax.legend()
        ax.set_ylabel(job.ylabel or (names[0] if len(names) == 1 else "value"))
    else:
        if not job.y or not job.z:
            raise FigplotsError(f"kind={job.kind} needs --y and --z columns")
        ux, uy = _grid_axes(table, job.x, job.y)
        zs = _column(table, job.z).reshape(len(ux), len(uy))
        masked = np.ma.masked_invalid(zs.T)
        if job.kind == "heatmap":
            cmap = plt.get_cmap("viridis").copy()
            cmap.set_bad("white")
            mesh = ax.pcolormesh(ux, uy, masked, cmap=cmap, shading="nearest")
            fig.colorbar(mesh, ax=ax, label=job.z)
        else:   # regionmap
            cats = discrete_categories(zs)
            if not cats:
                cats = [0]
            if len(cats) > len(REGION_COLORS):
                raise FigplotsError(
                    f"too many categories for a region map: {len(cats)}")
            cmap = ListedColormap([REGION_COLORS[i] for i in range(len(cats))])
            cmap.set_bad("white")
            bounds = [c - 0.5 for c in cats] + [cats[-1] + 0.5]
            norm = BoundaryNorm(bounds, cmap.N)
            mesh = ax.pcolormesh(ux, uy, masked, cmap=cmap, norm=norm,
                                 shading="nearest")
            bar = fig.colorbar(mesh, ax=ax, ticks=cats, label=job.z)
            bar.ax.set_yticklabels([str(c) for c in cats])
        ax.set_ylabel(job.ylabel or job.y)

    ax.set_xlabel(job.xlabel or job.x)
    if job.title:
        ax.set_title(job.title)
    return fig


def render(job: PlotJob) -> str:
    """Render a job to its output PNG and return the written path."""
    fig = build_figure(job)
    try:
        fig.savefig(job.out, dpi=job.dpi)
    except OSError as exc:
        raise FigplotsError(f"cannot write {job.out}: {exc}") from exc
    finally:
        plt.close(fig)
    return job.out
