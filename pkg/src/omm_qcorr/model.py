"""Parameter records, unit conventions, thermal occupations and steady states.

The system has five bosonic modes in fixed order ``(a, c1, c2, m, b)``:
an atomic ensemble mode, two orthogonally polarized cavity modes, a magnon
mode and a phonon mode.  Quadratures are interleaved as
``(X_a, Y_a, X_c1, Y_c1, X_c2, Y_c2, X_m, Y_m, q, p)`` with the vacuum
covariance matrix equal to identity/2.

All frequencies, detunings, decay rates and couplings are stored in angular
units (rad/s).  Configuration files use cyclic frequencies in Hz (the values
quoted as "nu/2pi" in the literature); loaders multiply by 2*pi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from scipy.constants import hbar, k as k_B

TWO_PI = 2.0 * math.pi

#: Canonical mode order used everywhere downstream.
MODES = ("a", "c1", "c2", "m", "b")
N_MODES = len(MODES)

#: Variance of each vacuum quadrature under the X=(a+a^dag)/sqrt(2) scaling.
VACUUM_VARIANCE = 0.5


class ParameterError(ValueError):
    """Invalid or inconsistent physical parameters; message names the field."""


class ConvergenceError(RuntimeError):
    """Self-consistent steady-state iteration failed to converge."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


def quad_indices(mode: str) -> tuple[int, int]:
    """Return the (X, Y) row indices of a mode in the 10x10 quadrature layout."""
    try:
        i = MODES.index(mode)
    except ValueError:
        raise ParameterError(f"unknown mode label {mode!r}; expected one of {MODES}")
    return 2 * i, 2 * i + 1


@dataclass(frozen=True)
class Conventions:
    """Fixed layout conventions shared by the whole pipeline."""

    mode_order: tuple[str, ...] = MODES
    vacuum_variance: float = VACUUM_VARIANCE

    def vacuum_cm(self):
        import numpy as np

        return self.vacuum_variance * np.eye(2 * len(self.mode_order))


@dataclass(frozen=True)
class EffectiveParams:
    """One operating point in the linearized (effective) parameterization.

    This is the parameterization the figure presets use: effective couplings
    G_c, G_m and effective detunings are given directly.  delta_c applies to
    both cavity polarizations.  omega_m only enters thermal occupations.
    """

    omega_b: float          # phonon frequency
    omega_m: float          # magnon frequency (thermal occupation only)
    delta_a: float          # atom detuning
    delta_c: float          # cavity detuning (both polarizations)
    delta_m: float          # magnon detuning
    gamma_a: float          # atom decay rate
    kappa_c1: float         # horizontal cavity decay rate
    kappa_c2: float         # vertical cavity decay rate
    kappa_m: float          # magnon decay rate
    gamma_b: float          # phonon decay rate
    g_ac2: float            # bare atom-cavity exchange coupling
    theta: float            # polarizer angle, radians, normalized to [0, 2pi)
    G_c: float              # total effective optomechanical coupling
    G_m: float              # effective magnomechanical coupling
    T: float                # temperature, kelvin

    def __post_init__(self):
        for name in ("omega_b", "omega_m", "gamma_a", "kappa_c1", "kappa_c2",
                     "kappa_m", "gamma_b"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise ParameterError(f"{name} must be strictly positive, got {v!r}")
        for name in ("g_ac2", "G_c", "G_m", "T"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise ParameterError(f"{name} must be non-negative, got {v!r}")
        for name in ("delta_a", "delta_c", "delta_m", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        object.__setattr__(self, "theta", self.theta % TWO_PI)


@dataclass(frozen=True)
class MicroscopicParams:
    """Bare couplings and drives from which the effective point is derived.

    Drive strengths may be given directly (eta_c, Omega_m) or through their
    physical inputs (P/omega_c for the laser, gamma_gyro/N_d/B_d for the
    microwave drive) -- never both for the same drive.
    """

    omega_b: float
    omega_m: float
    delta_a: float          # atom detuning (the atom sees no radiation pressure)
    delta_c0: float         # bare cavity detuning
    delta_m0: float         # bare magnon detuning
    gamma_a: float
    kappa_c1: float
    kappa_c2: float
    kappa_m: float
    gamma_b: float
    g_c: float              # bare optomechanical coupling
    g_m: float              # bare magnomechanical coupling
    g_ac2: float
    theta: float
    T: float
    eta_c: float | None = None      # laser-cavity drive coupling
    Omega_a: float = 0.0            # atom Rabi frequency
    Omega_m: float | None = None    # magnon Rabi frequency
    P: float | None = None          # laser input power, watts
    omega_c: float | None = None    # cavity frequency (for eta_c)
    gamma_gyro: float | None = None # gyromagnetic ratio, rad/s per tesla
    N_d: float | None = None        # number of spins addressed by the drive
    B_d: float | None = None        # microwave drive amplitude, tesla

    def __post_init__(self):
        for name in ("omega_b", "omega_m", "gamma_a", "kappa_c1", "kappa_c2",
                     "kappa_m", "gamma_b"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise ParameterError(f"{name} must be strictly positive, got {v!r}")
        for name in ("g_c", "g_m", "g_ac2", "T", "Omega_a"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be non-negative")
        for name, value in (("eta_c", self.eta_c), ("Omega_m", self.Omega_m)):
            if value is not None and value < 0.0:
                raise ParameterError(f"{name} must be non-negative")
        if self.eta_c is not None and self.P is not None:
            raise ParameterError("give either eta_c or P, not both")
        if self.Omega_m is not None and self.B_d is not None:
            raise ParameterError("give either Omega_m or B_d, not both")
        object.__setattr__(self, "theta", self.theta % TWO_PI)


@dataclass(frozen=True)
class SteadyState:
    """Converged classical amplitudes of the driven system."""

    c1s: complex
    c2s: complex
    m_s: complex
    q_s: float
    delta_c: float     # effective cavity detuning at the fixed point
    delta_m: float     # effective magnon detuning at the fixed point
    iterations: int

    @property
    def c_s(self) -> complex:
        """Combined optical amplitude sqrt(c1s^2 + c2s^2) (complex branch)."""
        import cmath

        return cmath.sqrt(self.c1s ** 2 + self.c2s ** 2)


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein mean occupation 1/(exp(hbar*omega/kB*T) - 1).

    omega is angular (rad/s), T in kelvin.  T = 0 returns the limit 0.
    """
    if omega <= 0.0:
        raise ParameterError(f"omega must be strictly positive, got {omega!r}")
    if T < 0.0:
        raise ParameterError(f"T must be non-negative, got {T!r}")
    if T == 0.0:
        return 0.0
    x = hbar * omega / (k_B * T)
    if x > 700.0:   # exp would overflow; occupation is numerically zero
        return 0.0
    return 1.0 / math.expm1(x)


def drive_strengths(micro: MicroscopicParams) -> tuple[float, float]:
    """Resolve the drive couplings (eta_c, Omega_m) of a microscopic point.

    eta_c = sqrt(2 P kappa_c / (hbar omega_c)) with kappa_c the mean of the
    two polarization decay rates; Omega_m = (sqrt(5)/4) gamma sqrt(N_d) B_d.
    Direct values pass through unchanged.
    """
    if micro.eta_c is not None:
        eta_c = micro.eta_c
    elif micro.P is not None:
        if micro.omega_c is None:
            raise ParameterError("eta_c from power requires omega_c")
        kappa_c = 0.5 * (micro.kappa_c1 + micro.kappa_c2)
        eta_c = math.sqrt(2.0 * micro.P * kappa_c / (hbar * micro.omega_c))
    else:
        raise ParameterError("missing drive input: give eta_c or P (+ omega_c)")

    if micro.Omega_m is not None:
        omega_m_drive = micro.Omega_m
    elif micro.B_d is not None:
        if micro.gamma_gyro is None or micro.N_d is None:
            raise ParameterError("Omega_m from field requires gamma_gyro and N_d")
        omega_m_drive = (math.sqrt(5.0) / 4.0) * micro.gamma_gyro \
            * math.sqrt(micro.N_d) * micro.B_d
    else:
        raise ParameterError(
            "missing drive input: give Omega_m or B_d (+ gamma_gyro, N_d)")
    return eta_c, omega_m_drive


def steady_state(micro: MicroscopicParams, tol: float = 1e-12,
                 max_iter: int = 1000, relax: float = 0.5) -> SteadyState:
    """Solve the classical fixed point of the driven system.

    The phonon displacement q_s shifts the cavity and magnon detunings,
    which in turn feed back into the amplitudes; the loop is closed by
    damped fixed-point iteration (relaxation 0.5) on q_s until successive
    updates differ by less than ``tol``.  The q_s update keeps the real part
    of the combination (g_m m_s - g_c c_s)/omega_b; the position
    expectation of a Hermitian operator is real and the imaginary residue is
    a phase-convention artifact.
    """
    eta_c, omega_m_drive = drive_strengths(micro)
    th = micro.theta
    cw = abs(math.cos(th))
    sw = abs(math.sin(th))

    q = 0.0
    trace: list[float] = []
    for it in range(1, max_iter + 1):
        delta_c = micro.delta_c0 - micro.g_c * q
        delta_m = micro.delta_m0 - micro.g_m * q
        m_s = omega_m_drive / (micro.kappa_m + 1j * delta_m)
        c1s = eta_c * cw / (micro.kappa_c1 + 1j * delta_c)
        c2s = (eta_c * sw * (micro.gamma_a + 1j * micro.delta_a)
               - 1j * micro.g_ac2 * micro.Omega_a) / (
            micro.g_ac2 ** 2
            + (micro.gamma_a + 1j * micro.delta_a) * (micro.kappa_c2 + 1j * delta_c))
        import cmath
        c_s = cmath.sqrt(c1s ** 2 + c2s ** 2)
        q_raw = ((micro.g_m * m_s - micro.g_c * c_s) / micro.omega_b).real
        trace.append(q_raw)
        if abs(q_raw - q) < tol:
            return SteadyState(c1s=c1s, c2s=c2s, m_s=m_s, q_s=q,
                               delta_c=delta_c, delta_m=delta_m, iterations=it)
        q = (1.0 - relax) * q + relax * q_raw

    raise ConvergenceError(
        f"steady-state iteration did not converge in {max_iter} steps; "
        f"last q updates: {trace[-5:]}", trace=trace)


def effective_from_micro(micro: MicroscopicParams, **solver_kwargs) -> EffectiveParams:
    """Map a microscopic point to the effective parameterization.

    Detunings are shifted by the converged displacement, and the couplings
    are dressed by the amplitude moduli: G_c = sqrt(2) g_c |c_s|,
    G_m = sqrt(2) g_m |m_s|.
    """
    ss = steady_state(micro, **solver_kwargs)
    return EffectiveParams(
        omega_b=micro.omega_b,
        omega_m=micro.omega_m,
        delta_a=micro.delta_a,
        delta_c=ss.delta_c,
        delta_m=ss.delta_m,
        gamma_a=micro.gamma_a,
        kappa_c1=micro.kappa_c1,
        kappa_c2=micro.kappa_c2,
        kappa_m=micro.kappa_m,
        gamma_b=micro.gamma_b,
        g_ac2=micro.g_ac2,
        theta=micro.theta,
        G_c=math.sqrt(2.0) * micro.g_c * abs(ss.c_s),
        G_m=math.sqrt(2.0) * micro.g_m * abs(ss.m_s),
        T=micro.T,
    )


# --- configuration files ---------------------------------------------------
#
# Keys follow the field names; frequency-like fields carry an `_hz` suffix
# and hold cyclic values (Hz), e.g. `omega_b_hz = 40e6`.  theta is in
# radians, T in kelvin, P in watts, B_d in tesla.  gamma_gyro uses the key
# `gamma_gyro_hz_per_t` (cyclic Hz per tesla).

EFFECTIVE_FREQ_FIELDS = ("omega_b", "omega_m", "delta_a", "delta_c", "delta_m",
                         "gamma_a", "kappa_c1", "kappa_c2", "kappa_m", "gamma_b",
                         "g_ac2", "G_c", "G_m")

MICRO_FREQ_FIELDS = ("omega_b", "omega_m", "delta_a", "delta_c0", "delta_m0",
                     "gamma_a", "kappa_c1", "kappa_c2", "kappa_m", "gamma_b",
                     "g_c", "g_m", "g_ac2", "eta_c", "Omega_a", "Omega_m",
                     "omega_c")

_MICRO_ONLY_KEYS = {"g_c_hz", "g_m_hz", "delta_c0_hz", "delta_m0_hz",
                    "eta_c_hz", "Omega_a_hz", "Omega_m_hz", "P", "B_d",
                    "omega_c_hz", "gamma_gyro_hz_per_t", "N_d"}


def read_config(path) -> dict:
    """Parse a TOML or JSON parameter/spec file into a plain dict."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".json":
        return json.loads(data.decode("utf-8"))
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:
        import tomli as tomllib
    return tomllib.loads(data.decode("utf-8"))


def _params_from_dict(raw: dict, cls, freq_fields):
    field_names = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key == "mode":
            continue
        if key.endswith("_hz") and key[:-3] in freq_fields:
            kwargs[key[:-3]] = TWO_PI * float(value)
        elif key == "gamma_gyro_hz_per_t" and "gamma_gyro" in field_names:
            kwargs["gamma_gyro"] = TWO_PI * float(value)
        elif key in field_names:
            if key in freq_fields:
                raise ParameterError(
                    f"key {key!r} is a frequency; use {key}_hz (cyclic Hz)")
            kwargs[key] = float(value)
        else:
            raise ParameterError(f"unknown parameter key {key!r}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ParameterError(f"incomplete parameter set: {exc}") from exc


def params_from_dict(raw: dict, mode: str | None = None):
    """Build EffectiveParams or MicroscopicParams from a config dict.

    The parameterization is chosen by the explicit ``mode`` key/argument or,
    failing that, inferred from the presence of microscopic-only keys.
    """
    mode = mode or raw.get("mode")
    if mode is None:
        mode = "microscopic" if (_MICRO_ONLY_KEYS & raw.keys()) else "effective"
    if mode == "effective":
        return _params_from_dict(raw, EffectiveParams, EFFECTIVE_FREQ_FIELDS)
    if mode == "microscopic":
        return _params_from_dict(raw, MicroscopicParams, MICRO_FREQ_FIELDS)
    raise ParameterError(f"unknown parameterization mode {mode!r}")


def load_params(path, mode: str | None = None):
    """Load a parameter file (TOML or JSON) into a parameter record."""
    return params_from_dict(read_config(path), mode=mode)


def params_to_dict(p: EffectiveParams) -> dict:
    """Serialize effective parameters back to file-unit keys."""
    out = {}
    for f in fields(p):
        v = getattr(p, f.name)
        if f.name in EFFECTIVE_FREQ_FIELDS:
            out[f.name + "_hz"] = v / TWO_PI
        else:
            out[f.name] = v
    return out


def with_field(p: EffectiveParams, field: str, value: float) -> EffectiveParams:
    """Return a copy of ``p`` with one field replaced (validated)."""
    if field not in {f.name for f in fields(p)}:
        raise ParameterError(f"unknown parameter field {field!r}")
    return replace(p, **{field: value})
