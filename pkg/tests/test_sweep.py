import io
import json
import math
import re

import numpy as np
import pytest

from omm_qcorr.measures import DEFAULT_MEASURES, MeasureReport
from omm_qcorr.model import TWO_PI, with_field
from omm_qcorr.sweep import (D1_POINTS, D2_POINTS, DIRECTION_CODES, NO_WAY,
                             ONE_WAY, PRESET_IDS, REVERSE_ONE_WAY, TWO_WAY,
                             SweepAxis, SweepSpec, SweepSpecError,
                             UnknownPresetError, classify_direction,
                             classify_entanglement, classify_steering_combo,
                             load_sweep_spec, preset, run_sweep, spec_from_dict,
                             subset_code, subset_label)

MHZ = TWO_PI * 1e6


def small_spec(base, measures=("E_am", "E_c1m", "E_c2m"), **axis_kwargs):
    axis = SweepAxis(field="theta", start=0.0, stop=math.pi / 2, count=5,
                     **axis_kwargs)
    return SweepSpec(base=base, axes=(axis,), measures=measures)


# --- axes and specs ------------------------------------------------------------

def test_axis_validation_errors():
    with pytest.raises(SweepSpecError):
        SweepAxis(field="bogus", start=0, stop=1, count=5)
    with pytest.raises(SweepSpecError):
        SweepAxis(field="theta", start=1.0, stop=0.0, count=5)
    with pytest.raises(SweepSpecError):
        SweepAxis(field="theta", start=0.0, stop=1.0, count=1)
    with pytest.raises(SweepSpecError):
        SweepAxis(field="T", start=0.0, stop=1.0, count=5, scale="log")
    with pytest.raises(SweepSpecError):
        SweepAxis(field="T", start=math.nan, stop=1.0, count=5)


def test_axis_values_linear_and_log():
    lin = SweepAxis(field="theta", start=0.0, stop=1.0, count=5)
    assert np.allclose(lin.values(), [0.0, 0.25, 0.5, 0.75, 1.0])
    log = SweepAxis(field="T", start=1e-3, stop=1.0, count=4, scale="log")
    assert np.allclose(log.values(), [1e-3, 1e-2, 1e-1, 1.0])


def test_spec_validation(baseline):
    with pytest.raises(SweepSpecError):
        SweepSpec(base=baseline, axes=())
    with pytest.raises(SweepSpecError):
        SweepSpec(base=baseline, axes=(
            SweepAxis(field="theta", start=0, stop=1, count=3),
            SweepAxis(field="theta", start=0, stop=1, count=3)))
    with pytest.raises(SweepSpecError):
        small_spec(baseline, measures=("E_bogus",))
    with pytest.raises(SweepSpecError):
        small_spec(baseline, measures=("X_am",))


def test_grid_is_row_major(baseline):
    spec = SweepSpec(base=baseline, axes=(
        SweepAxis(field="theta", start=0.0, stop=math.pi / 4, count=2),
        SweepAxis(field="g_ac2", start=0.0, stop=3 * MHZ, count=2)),
        measures=("E_am",))
    grid = spec.grid_values()
    assert grid.shape == (4, 2)
    expected = [(0.0, 0.0), (0.0, 3 * MHZ),
                (math.pi / 4, 0.0), (math.pi / 4, 3 * MHZ)]
    assert np.allclose(grid, expected)
    result = run_sweep(spec)
    assert len(result.stable) == 4
    assert np.allclose(result.axis_values, expected)


# --- running sweeps --------------------------------------------------------------

def test_run_sweep_shapes_and_stability(baseline):
    result = run_sweep(small_spec(baseline))
    assert result.shape == (5,)
    assert result.stable.all()
    assert np.isfinite(result.max_re_lambda).all()
    for name in ("E_am", "E_c1m", "E_c2m"):
        assert name in result.values
        assert np.isfinite(result.values[name]).all()


def test_run_sweep_records_parameter_errors_per_point(baseline):
    # kappa_c1 = 0 violates the strict-positivity invariant; the row is
    # recorded as failed instead of aborting the sweep
    spec = SweepSpec(base=baseline, axes=(
        SweepAxis(field="kappa_c1", start=0.0, stop=2 * MHZ, count=3),),
        measures=("E_am",))
    result = run_sweep(spec)
    assert result.errors[0] is not None and "kappa_c1" in result.errors[0]
    assert not result.stable[0]
    assert math.isnan(result.values["E_am"][0])
    assert result.errors[1] is None and result.stable[1]


def test_run_sweep_marks_unstable_rows(control_base):
    spec = SweepSpec(base=with_field(control_base, "g_ac2", 10 * MHZ),
                     axes=(SweepAxis(field="theta", start=1.4, stop=1.7, count=3),),
                     measures=("E_am",))
    result = run_sweep(spec)
    assert (~result.stable).any()
    nan_rows = np.isnan(result.values["E_am"])
    assert np.array_equal(nan_rows, ~result.stable)


def test_run_sweep_parallel_matches_serial(baseline):
    spec = small_spec(baseline)
    serial = run_sweep(spec, threads=1)
    parallel = run_sweep(spec, threads=2)
    for name in spec.measures:
        assert np.array_equal(serial.values[name], parallel.values[name])
    assert np.array_equal(serial.max_re_lambda, parallel.max_re_lambda)


def test_thread_count_from_environment(monkeypatch):
    from omm_qcorr.sweep import _resolve_threads

    monkeypatch.delenv("OMM_QCORR_THREADS", raising=False)
    assert _resolve_threads(None) == 1
    monkeypatch.setenv("OMM_QCORR_THREADS", "4")
    assert _resolve_threads(None) == 4
    assert _resolve_threads(2) == 2   # flag wins over the environment
    assert _resolve_threads(0) == 1


# --- classification ---------------------------------------------------------------

def test_classify_direction_contract():
    assert classify_direction(0.0, 0.0) == NO_WAY
    assert classify_direction(0.1, 0.0) == ONE_WAY
    assert classify_direction(0.0, 0.1) == REVERSE_ONE_WAY
    assert classify_direction(0.1, 0.1) == TWO_WAY
    # threshold, not sign, decides existence
    assert classify_direction(1e-7, 1e-7) == NO_WAY
    assert DIRECTION_CODES[TWO_WAY] == 3


def make_report(**values):
    return MeasureReport(stable=True, marginal=False, max_re_lambda=-1.0,
                         measures=values)


def test_classify_entanglement_subsets():
    rep = make_report(E_am=0.0, E_c1m=0.2, E_c2m=0.0)
    assert classify_entanglement(rep) == ("E_c1m",)
    rep_all = make_report(E_am=0.1, E_c1m=0.2, E_c2m=0.3)
    assert classify_entanglement(rep_all) == ("E_am", "E_c1m", "E_c2m")
    rep_none = make_report(E_am=0.0, E_c1m=0.0, E_c2m=1e-9)
    assert classify_entanglement(rep_none) == ()


def test_classify_requires_stable_report():
    rep = MeasureReport(stable=False, marginal=False, max_re_lambda=1.0,
                        measures={})
    with pytest.raises(ValueError):
        classify_entanglement(rep)
    with pytest.raises(ValueError):
        classify_steering_combo(rep)


def test_subset_code_and_label():
    names = ("E_am", "E_c1m", "E_c2m")
    assert subset_code(("E_am",), names) == 1
    assert subset_code(("E_c1m",), names) == 2
    assert subset_code(("E_am", "E_c2m"), names) == 5
    assert subset_code((), names) == 0
    assert subset_label(()) == "none"
    assert subset_label(("E_am", "E_c2m")) == "E_am+E_c2m"


# --- presets -----------------------------------------------------------------------

def test_preset_ids_complete():
    for fig in PRESET_IDS:
        spec = preset(fig, grid=3)
        assert spec.n_points in (3, 9)
    with pytest.raises(UnknownPresetError, match="fig4"):
        preset("fig9")


def test_preset_fig2a_axes():
    spec = preset("fig2a")
    assert tuple(ax.field for ax in spec.axes) == ("delta_a", "delta_m")
    wb = spec.base.omega_b
    assert spec.axes[0].start == -2 * wb and spec.axes[0].stop == 2 * wb
    assert spec.shape == (D2_POINTS, D2_POINTS)
    assert spec.measures == ("E_am",)


def test_preset_fig4_base_and_axes():
    spec = preset("fig4")
    assert spec.base.G_m == pytest.approx(3 * MHZ)
    assert tuple(ax.field for ax in spec.axes) == ("theta", "g_ac2")
    assert spec.axes[0].stop == pytest.approx(TWO_PI)
    assert spec.axes[1].stop == pytest.approx(10 * MHZ)


def test_preset_fig3h_axis():
    spec = preset("fig3h")
    (axis,) = spec.axes
    assert axis.field == "T" and axis.scale == "log"
    assert axis.count == D1_POINTS
    assert spec.measures == ("E_am", "E_c1m", "E_c2m")


def test_preset_grid_override():
    assert preset("fig8", grid=11).shape == (11, 11)
    assert preset("fig2d", grid=17).shape == (17,)


# --- CSV serialization ----------------------------------------------------------------

def run_tiny_control_sweep(control_base, count=5):
    spec = SweepSpec(
        base=control_base,
        axes=(SweepAxis(field="theta", start=0.0, stop=TWO_PI, count=count),
              SweepAxis(field="g_ac2", start=0.0, stop=10 * MHZ, count=count)),
        measures=DEFAULT_MEASURES)
    return run_sweep(spec)


def test_csv_format_and_determinism(control_base):
    result = run_tiny_control_sweep(control_base)
    buf1, buf2 = io.StringIO(), io.StringIO()
    result.to_csv(buf1)
    result.to_csv(buf2)
    assert buf1.getvalue() == buf2.getvalue()

    lines = buf1.getvalue().strip().split("\n")
    header = lines[0].split(",")
    assert header[:4] == ["theta", "g_ac2_hz", "stable", "max_re_lambda"]
    for name in DEFAULT_MEASURES:
        assert name in header
    for code_col in ("ent_code", "ent_label", "tri_code", "steer_code",
                     "dir_c1_mb", "dir_mb_c1c2", "dir_m_a"):
        assert code_col in header
    assert len(lines) == 1 + result.spec.n_points

    # unstable rows carry NaN sentinels and an "unstable" label
    rows = [line.split(",") for line in lines[1:]]
    i_stable = header.index("stable")
    i_eam = header.index("E_am")
    i_entlabel = header.index("ent_label")
    saw_unstable = False
    for row in rows:
        assert row[i_stable] in ("true", "false")
        if row[i_stable] == "false":
            saw_unstable = True
            assert row[i_eam] == "NaN"
            assert row[i_entlabel] == "unstable"
        else:
            float(row[i_eam])   # parses
    assert saw_unstable

    # axis columns are serialized in cyclic-frequency units
    g_col = header.index("g_ac2_hz")
    assert float(rows[-1][g_col]) == pytest.approx(10e6)


def test_csv_float_format_is_12_significant_digits(baseline):
    result = run_sweep(small_spec(baseline, measures=("E_am",)))
    buf = io.StringIO()
    result.to_csv(buf)
    lines = buf.getvalue().strip().split("\n")
    header = lines[0].split(",")
    row = lines[2].split(",")   # second grid point: theta nonzero
    for col in ("theta", "max_re_lambda", "E_am"):
        field = row[header.index(col)]
        assert re.fullmatch(r"-?\d\.\d{11}e[+-]\d{2,3}", field), (col, field)


def test_csv_measure_subset_and_code_selection(control_base):
    result = run_tiny_control_sweep(control_base)
    buf = io.StringIO()
    result.to_csv(buf, measures_subset=("E_am",), codes="none")
    header = buf.getvalue().split("\n")[0].split(",")
    assert header == ["theta", "g_ac2_hz", "stable", "max_re_lambda", "E_am"]

    buf2 = io.StringIO()
    result.to_csv(buf2, measures_subset=(), codes=("steer",))
    header2 = buf2.getvalue().split("\n")[0].split(",")
    assert header2 == ["theta", "g_ac2_hz", "stable", "max_re_lambda",
                       "steer_code", "steer_label"]
    with pytest.raises(SweepSpecError):
        result.to_csv(io.StringIO(), measures_subset=("E_zz",))


def test_stability_csv(control_base):
    result = run_tiny_control_sweep(control_base)
    buf = io.StringIO()
    result.to_stability_csv(buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0].split(",") == ["theta", "g_ac2_hz", "max_re_lambda", "stable"]
    assert len(lines) == 1 + result.spec.n_points


# --- sweep spec files ------------------------------------------------------------------

def test_spec_from_dict_explicit(baseline):
    from omm_qcorr.model import params_to_dict

    raw = {
        "base": params_to_dict(baseline),
        "axes": [{"field": "g_ac2", "start": 0.0, "stop": 10e6, "count": 7}],
        "measures": ["E_am", "E_c1m"],
    }
    spec = spec_from_dict(raw)
    assert spec.axes[0].stop == pytest.approx(10 * MHZ)   # Hz -> angular
    assert spec.shape == (7,)
    assert spec.measures == ("E_am", "E_c1m")
    spec9 = spec_from_dict(raw, grid=9)
    assert spec9.shape == (9,)


def test_spec_from_dict_preset_form():
    spec = spec_from_dict({"preset": "fig2d", "output": "out.csv"}, grid=5)
    assert spec.shape == (5,)
    assert spec.output == "out.csv"
    with pytest.raises(UnknownPresetError):
        spec_from_dict({"preset": "nope"})


def test_load_sweep_spec_json(tmp_path, baseline):
    from omm_qcorr.model import params_to_dict

    raw = {"base": params_to_dict(baseline),
           "axes": [{"field": "theta", "start": 0.0, "stop": 1.0, "count": 3}],
           "measures": ["E_am"]}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(raw))
    spec = load_sweep_spec(path)
    assert spec.axes[0].field == "theta"
    assert spec.axes[0].stop == 1.0   # theta is not a frequency field
