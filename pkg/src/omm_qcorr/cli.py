"""Command-line front end: single points, sweeps, figure datasets, stability maps.

Exit codes: 0 success, 1 usage/config/IO error, 2 instability of the
requested point (``point`` only; the sentinel report is still emitted).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import measures, sweep
from .model import (ConvergenceError, EffectiveParams, MicroscopicParams,
                    ParameterError, effective_from_micro, load_params)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _progress_printer(label: str):
    def progress(done: int, total: int):
        print(f"{label}: {done}/{total} points", file=sys.stderr)
    return progress


def _point_report_dict(report: measures.MeasureReport) -> dict:
    def clean(x):
        return None if not math.isfinite(x) else x

    out = {
        "stable": report.stable,
        "marginal": report.marginal,
        "max_re_lambda": report.max_re_lambda,
        "measures": {k: clean(v) for k, v in report.measures.items()},
    }
    if report.stable:
        ent = sweep.classify_entanglement(report)
        combo = sweep.classify_steering_combo(report)
        out["ent_code"] = sweep.subset_code(ent, sweep.ENT_MEASURES)
        out["ent_label"] = sweep.subset_label(ent)
        out["steer_code"] = sweep.subset_code(combo, sweep.STEER_MEASURES)
        out["steer_label"] = sweep.subset_label(combo)
        out["directions"] = {
            name: sweep.classify_direction(report.measures[fwd],
                                           report.measures[rev])
            for name, (fwd, rev) in sweep.DIR_PAIRS.items()
            if fwd in report.measures and rev in report.measures
        }
    else:
        out["ent_code"] = out["steer_code"] = None
        out["ent_label"] = out["steer_label"] = "unstable"
        out["directions"] = {}
    return out


def _point_report_csv(report: measures.MeasureReport) -> str:
    names = list(report.measures)
    header = ["stable", "max_re_lambda"] + names
    row = ["true" if report.stable else "false",
           sweep._format_float(report.max_re_lambda)]
    row += [sweep._format_float(report.measures[n]) for n in names]
    return ",".join(header) + "\n" + ",".join(row) + "\n"


def cmd_point(args) -> int:
    try:
        params = load_params(args.config, mode=args.mode)
        if isinstance(params, MicroscopicParams):
            params = effective_from_micro(params)
    except (ParameterError, ConvergenceError, OSError, ValueError) as exc:
        return _fail(f"{args.config}: {exc}")

    result = sweep.evaluate_point(params, measures.DEFAULT_MEASURES,
                                  form=args.steering_form)
    report = measures.MeasureReport(
        stable=result.stable, marginal=result.marginal,
        max_re_lambda=result.max_re_lambda,
        measures=dict(zip(measures.DEFAULT_MEASURES, result.values)))

    if args.format == "json":
        text = json.dumps(_point_report_dict(report), indent=2) + "\n"
    else:
        text = _point_report_csv(report)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            return _fail(f"cannot write {args.out}: {exc}")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.stable else EXIT_UNSTABLE


def cmd_sweep(args) -> int:
    try:
        spec = sweep.load_sweep_spec(args.config, grid=args.grid)
    except (sweep.SweepSpecError, sweep.UnknownPresetError, ParameterError,
            OSError, ValueError, KeyError) as exc:
        return _fail(f"{args.config}: {exc}")
    out = args.out or spec.output
    if not out:
        return _fail("no output path: give --out or an 'output' key in the spec")

    result = sweep.run_sweep(spec, threads=args.threads,
                             progress=_progress_printer("sweep"))
    try:
        result.to_csv(out)
    except OSError as exc:
        return _fail(f"cannot write {out}: {exc}")
    n_unstable = int((~result.stable).sum())
    print(f"wrote {out} ({result.spec.n_points} rows, {n_unstable} unstable)",
          file=sys.stderr)
    return EXIT_OK


def cmd_stability(args) -> int:
    try:
        spec = sweep.load_sweep_spec(args.config, grid=args.grid)
        spec = replace(spec, measures=())
    except (sweep.SweepSpecError, sweep.UnknownPresetError, ParameterError,
            OSError, ValueError, KeyError) as exc:
        return _fail(f"{args.config}: {exc}")
    out = args.out or spec.output
    if not out:
        return _fail("no output path: give --out or an 'output' key in the spec")
    result = sweep.run_sweep(spec, threads=args.threads,
                             progress=_progress_printer("stability"))
    try:
        result.to_stability_csv(out)
    except OSError as exc:
        return _fail(f"cannot write {out}: {exc}")
    return EXIT_OK


# --- figure reproduction -----------------------------------------------------
#
# Each figure maps to one or two sweeps; panels project measure or code
# columns out of the shared result.  Panel entries: (panel letter, run key,
# measure subset or None for all, code selection).

_FIG_PANELS = {
    "fig2": {
        "runs": {"map": ("fig2a", ("E_am", "E_c1m", "E_c2m")), "cut": ("fig2d", None)},
        "panels": [("a", "map", ("E_am",), "none"),
                   ("b", "map", ("E_c1m",), "none"),
                   ("c", "map", ("E_c2m",), "none"),
                   ("d", "cut", None, "auto")],
    },
    "fig3": {
        "runs": {"gm": ("fig3a", None), "gc": ("fig3b", None),
                 "kmap": ("fig3c", ("E_am", "E_c1m", "E_c2m")),
                 "km": ("fig3f", None), "gb": ("fig3g", None), "t": ("fig3h", None)},
        "panels": [("a", "gm", None, "auto"),
                   ("b", "gc", None, "auto"),
                   ("c", "kmap", ("E_am",), "none"),
                   ("d", "kmap", ("E_c1m",), "none"),
                   ("e", "kmap", ("E_c2m",), "none"),
                   ("f", "km", None, "auto"),
                   ("g", "gb", None, "auto"),
                   ("h", "t", None, "auto")],
    },
    "fig4": {
        "runs": {"map": ("fig4", None)},
        "panels": [("a", "map", ("E_am",), "none"),
                   ("b", "map", ("E_c1m",), "none"),
                   ("c", "map", ("E_c2m",), "none"),
                   ("d", "map", ("R_ac2m",), "none"),
                   ("e", "map", ("R_ac1m",), "none"),
                   ("f", "map", ("R_c1c2m",), "none"),
                   ("g", "map", (), ("ent",)),
                   ("h", "map", (), ("tri",))],
    },
    "fig5": {
        "runs": {"map": ("fig5", None)},
        "panels": [("a", "map", ("S_m_to_a",), "none"),
                   ("b", "map", ("S_m_to_c1",), "none"),
                   ("c", "map", ("S_m_to_c2",), "none"),
                   ("d", "map", ("S_m_to_b",), "none"),
                   ("e", "map", (), ("steer",))],
    },
    "fig6": {
        "runs": {"map": ("fig6", None)},
        "panels": [("a", "map", ("S_c1_to_mb",), "none"),
                   ("b", "map", ("S_mb_to_c1",), "none"),
                   ("c", "map", (), ("dir_c1_mb",)),
                   ("d", "map", ("S_c2_to_mb",), "none"),
                   ("e", "map", ("S_mb_to_c2",), "none"),
                   ("f", "map", (), ("dir_c2_mb",))],
    },
    "fig7": {
        "runs": {"map": ("fig7", None)},
        "panels": [("a", "map", ("S_mb_to_c1c2",), "none"),
                   ("b", "map", ("S_c1c2_to_mb",), "none"),
                   ("c", "map", (), ("dir_mb_c1c2",)),
                   ("d", "map", ("S_am_to_c1c2",), "none"),
                   ("e", "map", ("S_c1c2_to_am",), "none"),
                   ("f", "map", (), ("dir_am_c1c2",))],
    },
    "fig8": {
        "runs": {"map": ("fig8", None)},
        "panels": [("a", "map", None, "auto")],
    },
}

REPRODUCE_IDS = tuple(_FIG_PANELS)


def _panel_summary(result: sweep.SweepResult, panel_measures, codes) -> str:
    parts = []
    n_unstable = int((~result.stable).sum())
    if panel_measures:
        for name in panel_measures:
            col = result.values[name]
            finite = np.isfinite(col)
            if finite.any() and np.nanmax(col) > 0.0:
                i = int(np.nanargmax(np.where(finite, col, -np.inf)))
                loc = ", ".join(
                    f"{sweep.axis_header(ax.field)}="
                    f"{sweep._axis_to_file_units(ax.field, result.axis_values[i, j]):.6g}"
                    for j, ax in enumerate(result.spec.axes))
                parts.append(f"max {name} = {col[i]:.4g} at {loc}")
            else:
                parts.append(f"{name} vanishes on the grid")
    if codes != "none":
        eps = measures.EPS_POS
        for token in (codes if isinstance(codes, tuple) else ()):
            if token in ("ent", "tri", "steer"):
                names = {"ent": sweep.ENT_MEASURES, "tri": sweep.TRI_MEASURES,
                         "steer": sweep.STEER_MEASURES}[token]
                stable_rows = result.stable
                codes_col = [
                    sweep.subset_code(tuple(n for n in names
                                            if result.values[n][i] > eps), names)
                    for i in range(len(stable_rows)) if stable_rows[i]]
                n_regions = len(set(codes_col))
                parts.append(f"{token} codes: {n_regions} distinct on stable grid")
            elif token in sweep.DIR_PAIRS:
                fwd, rev = sweep.DIR_PAIRS[token]
                labels = {
                    sweep.classify_direction(result.values[fwd][i],
                                             result.values[rev][i], eps)
                    for i in range(len(result.stable)) if result.stable[i]}
                parts.append(f"{token}: {len(labels)} directionality classes")
    parts.append(f"{n_unstable} unstable cells")
    return "; ".join(parts)


def cmd_reproduce(args) -> int:
    figure = args.figure
    if figure not in _FIG_PANELS:
        return _fail(f"unknown figure id {figure!r}; "
                     f"valid ids: {', '.join(REPRODUCE_IDS)}")
    out_dir = Path(args.out or ".")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail(f"cannot create {out_dir}: {exc}")

    plan = _FIG_PANELS[figure]
    results = {}
    for key, (preset_id, measure_override) in plan["runs"].items():
        spec = sweep.preset(preset_id, grid=args.grid)
        if measure_override is not None:
            spec = replace(spec, measures=measure_override)
        results[key] = sweep.run_sweep(spec, threads=args.threads,
                                       progress=_progress_printer(f"{figure}:{key}"))

    for panel, run_key, panel_measures, codes in plan["panels"]:
        result = results[run_key]
        path = out_dir / f"{figure}_{panel}.csv"
        try:
            result.to_csv(path, measures_subset=panel_measures, codes=codes)
        except OSError as exc:
            return _fail(f"cannot write {path}: {exc}")
        print(f"{path.name}: {_panel_summary(result, panel_measures, codes)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omm-qcorr",
        description="Steady-state quantum correlations of the five-mode "
                    "optomagnomechanical model: single points, parameter "
                    "sweeps, figure datasets and stability maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="evaluate one operating point")
    p.add_argument("--config", required=True, help="TOML/JSON parameter file")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--mode", choices=("effective", "microscopic"), default=None,
                   help="parameterization of the config file (default: inferred)")
    p.add_argument("--steering-form", choices=("det", "symplectic"), default="det")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=cmd_point)

    s = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    s.add_argument("--config", required=True, help="TOML/JSON sweep spec file")
    s.add_argument("--out", default=None, help="output CSV path")
    s.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $OMM_QCORR_THREADS or 1)")
    s.add_argument("--grid", type=int, default=None,
                   help="override the per-axis point count")
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("reproduce", help="write the dataset of one figure")
    r.add_argument("figure", help=f"one of: {', '.join(REPRODUCE_IDS)}")
    r.add_argument("--out", default=".", help="output directory")
    r.add_argument("--threads", type=int, default=None)
    r.add_argument("--grid", type=int, default=None,
                   help="override the per-axis point count")
    r.set_defaults(func=cmd_reproduce)

    st = sub.add_parser("stability", help="map max Re(eig A) over a grid")
    st.add_argument("--config", required=True, help="TOML/JSON sweep spec file")
    st.add_argument("--out", default=None, help="output CSV path")
    st.add_argument("--threads", type=int, default=None)
    st.add_argument("--grid", type=int, default=None)
    st.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
