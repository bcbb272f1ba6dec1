"""Steady-state quantum correlations of a five-mode optomagnomechanical model.

The package computes the stationary covariance matrix of the linearized
atom / two-polarization-cavity / magnon / phonon system and evaluates
entanglement and steering measures on it, over single points or parameter
sweeps.  See README.md for the workflow and the CLI.
"""

from .dynamics import (LyapunovError, StabilityReport, UnstablePointError,
                       build_diffusion, build_drift, lyapunov_residual,
                       stability, steady_covariance)
from .measures import (DEFAULT_MEASURES, EPS_POS, MeasureReport,
                       collective_steering, evaluate_measure, full_report,
                       log_negativity, partial_transpose, reduce,
                       residual_contangle, residual_contangle_min, steering,
                       symplectic_spectrum)
from .model import (MODES, VACUUM_VARIANCE, Conventions, EffectiveParams,
                    MicroscopicParams, ParameterError, SteadyState,
                    drive_strengths, effective_from_micro, load_params,
                    steady_state, thermal_occupation, with_field)
from .sweep import (PRESET_IDS, SweepAxis, SweepResult, SweepSpec,
                    classify_direction, classify_entanglement,
                    classify_steering_combo, evaluate_point, fig2_baseline,
                    fig4_base, load_sweep_spec, preset, run_sweep)

__version__ = "0.1.0"

__all__ = [
    "MODES", "VACUUM_VARIANCE", "Conventions", "EffectiveParams",
    "MicroscopicParams", "ParameterError", "SteadyState", "drive_strengths",
    "effective_from_micro", "load_params", "steady_state",
    "thermal_occupation", "with_field",
    "LyapunovError", "StabilityReport", "UnstablePointError",
    "build_diffusion", "build_drift", "lyapunov_residual", "stability",
    "steady_covariance",
    "DEFAULT_MEASURES", "EPS_POS", "MeasureReport", "collective_steering",
    "evaluate_measure", "full_report", "log_negativity", "partial_transpose",
    "reduce", "residual_contangle", "residual_contangle_min", "steering",
    "symplectic_spectrum",
    "PRESET_IDS", "SweepAxis", "SweepResult", "SweepSpec",
    "classify_direction", "classify_entanglement", "classify_steering_combo",
    "evaluate_point", "fig2_baseline", "fig4_base", "load_sweep_spec",
    "preset", "run_sweep",
]
