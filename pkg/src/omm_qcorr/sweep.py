"""Parameter-grid sweeps, figure presets, region classification and CSV output.

A sweep evaluates the full pipeline (drift -> stability -> covariance ->
measures) on a 1D or 2D grid of one operating point's fields.  Grid points
are independent; results are always gathered in deterministic row-major
order (first axis outermost), so the serialized CSV is reproducible
bit-for-bit regardless of the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from functools import partial
from pathlib import Path

import numpy as np

from . import dynamics, measures
from .model import (EFFECTIVE_FREQ_FIELDS, TWO_PI, EffectiveParams,
                    ParameterError, params_from_dict)

D1_POINTS = 201     # default 1D resolution
D2_POINTS = 101     # default 2D resolution (per axis)

_EFFECTIVE_FIELD_NAMES = tuple(f.name for f in fields(EffectiveParams))


class SweepSpecError(ValueError):
    """Malformed sweep specification."""


class UnknownPresetError(ValueError):
    """Unknown figure preset identifier."""


@dataclass(frozen=True)
class SweepAxis:
    """One swept field: an inclusive range in internal (angular) units."""

    field: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.field not in _EFFECTIVE_FIELD_NAMES:
            raise SweepSpecError(f"unknown sweep field {self.field!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise SweepSpecError(f"axis {self.field}: bounds must be finite")
        if not self.start < self.stop:
            raise SweepSpecError(f"axis {self.field}: need start < stop")
        if self.count < 2:
            raise SweepSpecError(f"axis {self.field}: need at least 2 points")
        if self.scale not in ("linear", "log"):
            raise SweepSpecError(f"axis {self.field}: scale must be linear or log")
        if self.scale == "log" and self.start <= 0.0:
            raise SweepSpecError(f"axis {self.field}: log scale needs start > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop),
                               self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """A base operating point plus one or two swept axes and a measure list."""

    base: EffectiveParams
    axes: tuple[SweepAxis, ...]
    measures: tuple[str, ...] = measures.DEFAULT_MEASURES
    steering_form: str = "det"
    output: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "measures", tuple(self.measures))
        if not 1 <= len(self.axes) <= 2:
            raise SweepSpecError("a sweep has one or two axes")
        if len({ax.field for ax in self.axes}) != len(self.axes):
            raise SweepSpecError("axes must sweep distinct fields")
        if self.steering_form not in ("det", "symplectic"):
            raise SweepSpecError(f"unknown steering form {self.steering_form!r}")
        vacuum = 0.5 * np.eye(10)
        for name in self.measures:
            try:    # parse/shape validation; vacuum is a cheap physical CM
                measures.evaluate_measure(name, vacuum)
            except measures.ModeSetError as exc:
                raise SweepSpecError(str(exc)) from exc

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.count for ax in self.axes)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))

    def grid_values(self) -> np.ndarray:
        """All grid points, row-major over axes; shape (n_points, n_axes)."""
        axes_values = [ax.values() for ax in self.axes]
        if len(axes_values) == 1:
            return axes_values[0][:, None]
        mesh = np.meshgrid(*axes_values, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class PointResult:
    """Pipeline outcome at a single operating point."""

    stable: bool
    marginal: bool
    max_re_lambda: float
    residual: float
    min_symplectic: float
    values: tuple[float, ...]
    error: str | None = None


def evaluate_point(p: EffectiveParams, measure_names, form: str = "det") -> PointResult:
    """Run drift -> stability -> covariance -> measures at one point."""
    A = dynamics.build_drift(p)
    D = dynamics.build_diffusion(p)
    rep = dynamics.stability(A, omega_b=p.omega_b)
    if rep.stable:
        V = dynamics.steady_covariance(A, D, rep)
        residual = dynamics.lyapunov_residual(A, V, D)
        min_nu = float(measures.symplectic_spectrum(V)[0])
        report = measures.full_report(V, rep, measure_names, form=form)
    else:
        residual = math.nan
        min_nu = math.nan
        report = measures.full_report(None, rep, measure_names, form=form)
    return PointResult(
        stable=rep.stable, marginal=rep.marginal, max_re_lambda=rep.max_real_part,
        residual=residual, min_symplectic=min_nu,
        values=tuple(report.measures[name] for name in measure_names))


_POINT_ERRORS = (ParameterError, dynamics.LyapunovError,
                 dynamics.EigendecompositionError, dynamics.UnstablePointError,
                 measures.SpectrumError, measures.SingularBlockError,
                 measures.MonogamyViolationError)


def _eval_grid_point(spec: SweepSpec, values) -> PointResult:
    try:
        p = spec.base
        for ax, v in zip(spec.axes, values):
            p = replace(p, **{ax.field: float(v)})
        return evaluate_point(p, spec.measures, form=spec.steering_form)
    except _POINT_ERRORS as exc:
        nan = math.nan
        return PointResult(stable=False, marginal=False, max_re_lambda=nan,
                           residual=nan, min_symplectic=nan,
                           values=(nan,) * len(spec.measures),
                           error=f"{type(exc).__name__}: {exc}")


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("OMM_QCORR_THREADS", "1"))
    return max(1, threads)


def run_sweep(spec: SweepSpec, threads: int | None = None,
              progress=None) -> "SweepResult":
    """Evaluate a sweep grid; per-point failures are recorded, never raised.

    ``threads`` > 1 distributes points over worker processes; the output is
    identical to a serial run because every point is pure and rows are
    gathered in grid order.
    """
    threads = _resolve_threads(threads)
    grid = spec.grid_values()
    n = len(grid)
    rows: list[PointResult] = []
    if threads == 1:
        iterator = (_eval_grid_point(spec, values) for values in grid)
    else:
        executor = ProcessPoolExecutor(max_workers=threads)
        iterator = executor.map(partial(_eval_grid_point, spec), grid,
                                chunksize=max(1, n // (threads * 8)))
    step = max(1, n // 20)
    for i, row in enumerate(iterator, start=1):
        rows.append(row)
        if progress is not None and (i % step == 0 or i == n):
            progress(i, n)
    if threads > 1:
        executor.shutdown()

    return SweepResult(
        spec=spec,
        axis_values=grid,
        stable=np.array([r.stable for r in rows]),
        marginal=np.array([r.marginal for r in rows]),
        max_re_lambda=np.array([r.max_re_lambda for r in rows]),
        residual=np.array([r.residual for r in rows]),
        min_symplectic=np.array([r.min_symplectic for r in rows]),
        values={name: np.array([r.values[j] for r in rows])
                for j, name in enumerate(spec.measures)},
        errors=[r.error for r in rows],
    )


# --- region classification ---------------------------------------------------

ENT_MEASURES = ("E_am", "E_c1m", "E_c2m")
TRI_MEASURES = ("R_ac2m", "R_ac1m", "R_c1c2m")
STEER_MEASURES = ("S_m_to_a", "S_m_to_c1", "S_m_to_c2", "S_m_to_b")

#: Forward/reverse measure pairs that get a directionality column.
DIR_PAIRS = {
    "dir_m_a": ("S_m_to_a", "S_a_to_m"),
    "dir_m_c1": ("S_m_to_c1", "S_c1_to_m"),
    "dir_m_c2": ("S_m_to_c2", "S_c2_to_m"),
    "dir_m_b": ("S_m_to_b", "S_b_to_m"),
    "dir_c1_mb": ("S_c1_to_mb", "S_mb_to_c1"),
    "dir_c2_mb": ("S_c2_to_mb", "S_mb_to_c2"),
    "dir_mb_c1c2": ("S_mb_to_c1c2", "S_c1c2_to_mb"),
    "dir_am_c1c2": ("S_am_to_c1c2", "S_c1c2_to_am"),
}

NO_WAY, ONE_WAY, REVERSE_ONE_WAY, TWO_WAY = ("no-way", "one-way",
                                             "reverse one-way", "two-way")
DIRECTION_CODES = {NO_WAY: 0, ONE_WAY: 1, REVERSE_ONE_WAY: 2, TWO_WAY: 3}


def classify_subset(report_values: dict, names, eps: float = measures.EPS_POS):
    """Subset of ``names`` whose value exceeds the existence threshold."""
    return tuple(n for n in names if report_values[n] > eps)


def classify_entanglement(report: measures.MeasureReport,
                          eps: float = measures.EPS_POS):
    """Which of the three magnon entanglements exist at a stable point."""
    if not report.stable:
        raise ValueError("entanglement classification needs a stable point")
    return classify_subset(report.measures, ENT_MEASURES, eps)


def classify_steering_combo(report: measures.MeasureReport,
                            eps: float = measures.EPS_POS):
    """Which of the four magnon-as-steerer steerings exist at a stable point."""
    if not report.stable:
        raise ValueError("steering classification needs a stable point")
    return classify_subset(report.measures, STEER_MEASURES, eps)


def classify_direction(s_ab: float, s_ba: float,
                       eps: float = measures.EPS_POS) -> str:
    """Directionality of a steering pair from its two one-way values."""
    forward = s_ab > eps
    backward = s_ba > eps
    if forward and backward:
        return TWO_WAY
    if forward:
        return ONE_WAY
    if backward:
        return REVERSE_ONE_WAY
    return NO_WAY


def subset_code(present, names) -> int:
    """Bitmask of a measure subset, bit i set when names[i] is present."""
    return sum(1 << i for i, n in enumerate(names) if n in present)


def subset_label(present) -> str:
    return "+".join(present) if present else "none"


# --- serialization -----------------------------------------------------------

def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "NaN"
    return f"{x:.11e}"   # 12 significant digits, scientific


def axis_header(field: str) -> str:
    """CSV column name of a swept field (file units)."""
    return field + "_hz" if field in EFFECTIVE_FREQ_FIELDS else field


def _axis_to_file_units(field: str, values: np.ndarray) -> np.ndarray:
    return values / TWO_PI if field in EFFECTIVE_FREQ_FIELDS else values


@dataclass
class SweepResult:
    """Row-major table of per-point results plus solver diagnostics.

    ``residual`` and ``min_symplectic`` are in-memory diagnostics (Lyapunov
    relative residual and smallest symplectic eigenvalue of V per stable
    point); they are not serialized.
    """

    spec: SweepSpec
    axis_values: np.ndarray             # internal units, (n_points, n_axes)
    stable: np.ndarray
    marginal: np.ndarray
    max_re_lambda: np.ndarray
    residual: np.ndarray
    min_symplectic: np.ndarray
    values: dict[str, np.ndarray]
    errors: list

    @property
    def shape(self) -> tuple[int, ...]:
        return self.spec.shape

    def column(self, name: str) -> np.ndarray:
        return self.values[name]

    def grid(self, name: str) -> np.ndarray:
        """A measure column reshaped to the grid shape."""
        return self.values[name].reshape(self.shape)

    def _code_columns(self, codes):
        """Resolve which code-column groups to emit."""
        available = set(self.values)
        groups = []
        if codes == "none":
            return groups
        if codes == "auto":
            wanted = []
            if set(ENT_MEASURES) <= available:
                wanted.append("ent")
            if set(TRI_MEASURES) <= available:
                wanted.append("tri")
            if set(STEER_MEASURES) <= available:
                wanted.append("steer")
            wanted.extend(name for name, pair in DIR_PAIRS.items()
                          if set(pair) <= available)
        else:
            wanted = list(codes)
        for token in wanted:
            if token == "ent":
                groups.append(("ent_code", "ent_label", ENT_MEASURES))
            elif token == "tri":
                groups.append(("tri_code", "tri_label", TRI_MEASURES))
            elif token == "steer":
                groups.append(("steer_code", "steer_label", STEER_MEASURES))
            elif token in DIR_PAIRS:
                groups.append((token, None, DIR_PAIRS[token]))
            else:
                raise SweepSpecError(f"unknown code column group {token!r}")
        return groups

    def to_csv(self, target, measures_subset=None, codes="auto") -> None:
        """Write the result table as CSV (12-significant-digit floats).

        ``measures_subset`` restricts the measure columns; ``codes`` selects
        classification columns ("auto", "none", or an explicit tuple such as
        ("ent",) or ("dir_c1_mb",)).  Unstable or failed rows carry the
        "NaN" sentinel in measure and code columns.
        """
        selected = (tuple(self.spec.measures) if measures_subset is None
                    else tuple(measures_subset))
        for name in selected:
            if name not in self.values:
                raise SweepSpecError(f"measure {name!r} not in this sweep")
        code_groups = self._code_columns(codes)

        header = [axis_header(ax.field) for ax in self.spec.axes]
        header += ["stable", "max_re_lambda"]
        header += list(selected)
        for code_name, label_name, _ in code_groups:
            header.append(code_name)
            if label_name:
                header.append(label_name)

        axis_cols = [_axis_to_file_units(ax.field, self.axis_values[:, j])
                     for j, ax in enumerate(self.spec.axes)]
        lines = [",".join(header)]
        eps = measures.EPS_POS
        for i in range(len(self.axis_values)):
            row = [_format_float(col[i]) for col in axis_cols]
            row.append("true" if self.stable[i] else "false")
            row.append(_format_float(self.max_re_lambda[i]))
            row.extend(_format_float(self.values[name][i]) for name in selected)
            for code_name, label_name, group_names in code_groups:
                if not self.stable[i]:
                    row.append("NaN")
                    if label_name:
                        row.append("unstable")
                elif code_name.startswith("dir_"):
                    fwd, rev = group_names
                    direction = classify_direction(self.values[fwd][i],
                                                   self.values[rev][i], eps)
                    row.append(str(DIRECTION_CODES[direction]))
                else:
                    present = tuple(n for n in group_names
                                    if self.values[n][i] > eps)
                    row.append(str(subset_code(present, group_names)))
                    if label_name:
                        row.append(subset_label(present))
            lines.append(",".join(row))
        _write_text(target, "\n".join(lines) + "\n")

    def to_stability_csv(self, target) -> None:
        """Stability map: axis columns, max Re(eig A) and the stable flag."""
        header = [axis_header(ax.field) for ax in self.spec.axes]
        header += ["max_re_lambda", "stable"]
        axis_cols = [_axis_to_file_units(ax.field, self.axis_values[:, j])
                     for j, ax in enumerate(self.spec.axes)]
        lines = [",".join(header)]
        for i in range(len(self.axis_values)):
            row = [_format_float(col[i]) for col in axis_cols]
            row.append(_format_float(self.max_re_lambda[i]))
            row.append("true" if self.stable[i] else "false")
            lines.append(",".join(row))
        _write_text(target, "\n".join(lines) + "\n")


def _write_text(target, text: str) -> None:
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


# --- sweep-spec files --------------------------------------------------------

def axis_from_dict(raw: dict) -> SweepAxis:
    """Build an axis from file-unit dict (frequencies in cyclic Hz)."""
    try:
        field = raw["field"]
        start = float(raw["start"])
        stop = float(raw["stop"])
    except KeyError as exc:
        raise SweepSpecError(f"axis entry missing key {exc}") from exc
    if field in EFFECTIVE_FREQ_FIELDS:
        start *= TWO_PI
        stop *= TWO_PI
    return SweepAxis(field=field, start=start, stop=stop,
                     count=int(raw.get("count", D1_POINTS)),
                     scale=raw.get("scale", "linear"))


def spec_from_dict(raw: dict, grid: int | None = None) -> SweepSpec:
    """Build a SweepSpec from a parsed config dict.

    Either ``{"preset": "fig4", ...}`` or an explicit ``base`` + ``axes``
    description.  ``grid`` overrides every axis point count.
    """
    if "preset" in raw:
        spec = preset(raw["preset"], grid=grid)
        if "measures" in raw:
            spec = replace(spec, measures=tuple(raw["measures"]))
        if "output" in raw:
            spec = replace(spec, output=raw["output"])
        return spec
    try:
        base_dict = raw["base"]
        axes_raw = raw["axes"]
    except KeyError as exc:
        raise SweepSpecError(f"sweep spec missing key {exc}") from exc
    base = params_from_dict(base_dict, mode="effective")
    axes = tuple(axis_from_dict(a) for a in axes_raw)
    if grid is not None:
        axes = tuple(replace(ax, count=grid) for ax in axes)
    return SweepSpec(
        base=base, axes=axes,
        measures=tuple(raw.get("measures", measures.DEFAULT_MEASURES)),
        steering_form=raw.get("steering_form", "det"),
        output=raw.get("output"))


def load_sweep_spec(path, grid: int | None = None) -> SweepSpec:
    from .model import read_config

    return spec_from_dict(read_config(path), grid=grid)


# --- figure presets ----------------------------------------------------------

def fig2_baseline() -> EffectiveParams:
    """Operating point of the detuning maps (every other preset builds on it)."""
    mhz = TWO_PI * 1e6
    omega_b = TWO_PI * 40e6
    return EffectiveParams(
        omega_b=omega_b,
        omega_m=TWO_PI * 10e9,
        delta_a=omega_b,
        delta_c=omega_b,
        delta_m=-omega_b,
        gamma_a=1.0 * mhz,
        kappa_c1=3.0 * mhz,
        kappa_c2=1.0 * mhz,
        kappa_m=1.0 * mhz,
        gamma_b=TWO_PI * 100.0,
        g_ac2=3.0 * mhz,
        theta=math.pi / 4.0,
        G_c=10.0 * mhz,
        G_m=2.0 * mhz,
        T=0.010,
    )


def fig4_base() -> EffectiveParams:
    """The polarization-control maps raise the magnomechanical coupling."""
    return replace(fig2_baseline(), G_m=TWO_PI * 3e6)


def _preset_table() -> dict:
    base = fig2_baseline()
    wb = base.omega_b
    mhz = TWO_PI * 1e6
    detuning = dict(start=-2 * wb, stop=2 * wb)
    kappa_axis = dict(start=0.0, stop=10 * mhz)
    theta_axis = dict(field="theta", start=0.0, stop=TWO_PI)
    gac2_axis = dict(field="g_ac2", start=0.0, stop=10 * mhz)
    ents = ("E_am", "E_c1m", "E_c2m")

    table = {}
    for fig, measure in zip(("fig2a", "fig2b", "fig2c"), ents):
        table[fig] = dict(base=base, axes_2d=(
            dict(field="delta_a", **detuning), dict(field="delta_m", **detuning)),
            measures=(measure,))
    table["fig2d"] = dict(base=base, axes_1d=(
        dict(field="delta_c", start=0.0, stop=2 * wb),), measures=ents)
    table["fig3a"] = dict(base=base, axes_1d=(
        dict(field="G_m", start=0.0, stop=5 * mhz),), measures=ents)
    table["fig3b"] = dict(base=base, axes_1d=(
        dict(field="G_c", start=0.0, stop=20 * mhz),), measures=ents)
    for fig, measure in zip(("fig3c", "fig3d", "fig3e"), ents):
        table[fig] = dict(base=base, axes_2d=(
            dict(field="kappa_c1", **kappa_axis), dict(field="kappa_c2", **kappa_axis)),
            measures=(measure,))
    table["fig3f"] = dict(base=base, axes_1d=(
        dict(field="kappa_m", **kappa_axis),), measures=ents)
    table["fig3g"] = dict(base=base, axes_1d=(
        dict(field="gamma_b", start=TWO_PI * 10.0, stop=1 * mhz, scale="log"),),
        measures=ents)
    table["fig3h"] = dict(base=base, axes_1d=(
        dict(field="T", start=1e-3, stop=5.0, scale="log"),), measures=ents)

    control = fig4_base()
    table["fig4"] = dict(base=control, axes_2d=(theta_axis, gac2_axis),
                         measures=ents + ("R_ac2m", "R_ac1m", "R_c1c2m"))
    table["fig5"] = dict(base=control, axes_2d=(theta_axis, gac2_axis),
                         measures=("S_m_to_a", "S_m_to_c1", "S_m_to_c2", "S_m_to_b",
                                   "S_a_to_m", "S_c1_to_m", "S_c2_to_m", "S_b_to_m"))
    table["fig6"] = dict(base=control, axes_2d=(theta_axis, gac2_axis),
                         measures=("S_c1_to_mb", "S_mb_to_c1",
                                   "S_c2_to_mb", "S_mb_to_c2"))
    table["fig7"] = dict(base=control, axes_2d=(theta_axis, gac2_axis),
                         measures=("S_mb_to_c1c2", "S_c1c2_to_mb",
                                   "S_am_to_c1c2", "S_c1c2_to_am"))
    table["fig8"] = dict(base=control, axes_2d=(theta_axis, gac2_axis),
                         measures=("S_c_ac1c2b_to_m", "S_ac1c2_to_m",
                                   "S_c1c2b_to_m", "S_ac1b_to_m", "S_ac2b_to_m"))
    return table


PRESET_IDS = ("fig2a", "fig2b", "fig2c", "fig2d",
              "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig3g", "fig3h",
              "fig4", "fig5", "fig6", "fig7", "fig8")


def preset(figure: str, grid: int | None = None) -> SweepSpec:
    """Sweep specification reproducing one figure panel group.

    ``grid`` overrides the per-axis point count (default 201 for 1D cuts,
    101x101 for 2D maps).
    """
    table = _preset_table()
    if figure not in table:
        raise UnknownPresetError(
            f"unknown figure id {figure!r}; valid ids: {', '.join(PRESET_IDS)}")
    entry = table[figure]
    if "axes_2d" in entry:
        count = grid if grid is not None else D2_POINTS
        axes = tuple(SweepAxis(count=count, **a) for a in entry["axes_2d"])
    else:
        count = grid if grid is not None else D1_POINTS
        axes = tuple(SweepAxis(count=count, **a) for a in entry["axes_1d"])
    return SweepSpec(base=entry["base"], axes=axes, measures=entry["measures"])
