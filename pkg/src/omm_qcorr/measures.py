"""Quantum-correlation measures evaluated on 10x10 covariance matrices.

Everything here works on real symmetric covariance matrices in the
conventions of :mod:`omm_qcorr.model`: interleaved (X, Y) quadratures in
mode order (a, c1, c2, m, b), vacuum variance 1/2.  Symplectic eigenvalues
of physical states are therefore >= 1/2.

Measure names used throughout (and in sweep CSV headers) are built from
mode labels: ``E_am`` (log-negativity of the a|m pair), ``R_ac2m`` (minimum
residual contangle of the a,c2,m triple), ``S_mb_to_c1`` (steerability of
c1 by the joint m+b party), ``S_c_ac1c2b_to_m`` (collective steering of m
by all four other modes).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dynamics import StabilityReport
from .model import MODES

#: Existence threshold for "a measure is present" decisions (region codes,
#: collective-steering zero conditions).  Well above the 1e-10 numerical
#: noise floor and far below the O(0.1) scale of the maps.
EPS_POS = 1e-5

SENTINEL = float("nan")


class ModeSetError(ValueError):
    """Invalid mode subset (unknown label, duplicate, empty, overlap)."""


class SpectrumError(RuntimeError):
    """Symplectic spectrum extraction failed (complex residue, bad shape)."""


class SingularBlockError(RuntimeError):
    """A covariance sub-block was numerically singular or non-positive."""


class MonogamyViolationError(RuntimeError):
    """Residual contangle below the numerical noise floor (solver bug)."""


def _check_modes(modes) -> tuple[str, ...]:
    modes = tuple(modes)
    if not modes:
        raise ModeSetError("mode set must be non-empty")
    for mode in modes:
        if mode not in MODES:
            raise ModeSetError(f"unknown mode label {mode!r}; expected one of {MODES}")
    if len(set(modes)) != len(modes):
        raise ModeSetError(f"duplicate mode labels in {modes}")
    return modes


def reduce(V: np.ndarray, modes) -> np.ndarray:
    """Extract the covariance sub-matrix of the given modes, in their order."""
    modes = _check_modes(modes)
    idx = []
    for mode in modes:
        i = 2 * MODES.index(mode)
        idx.extend((i, i + 1))
    return np.asarray(V)[np.ix_(idx, idx)]


def partial_transpose(V: np.ndarray, modes, transposed) -> np.ndarray:
    """Flip the Y-quadrature sign of the transposed modes: V -> P V P."""
    modes = _check_modes(modes)
    transposed = _check_modes(transposed)
    if not set(transposed) <= set(modes):
        raise ModeSetError(f"transposed modes {transposed} not within {modes}")
    signs = np.ones(2 * len(modes))
    for mode in transposed:
        signs[2 * modes.index(mode) + 1] = -1.0
    return signs[:, None] * np.asarray(V) * signs[None, :]


def symplectic_form(n_modes: int) -> np.ndarray:
    """Direct sum of n copies of [[0, 1], [-1, 0]]."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


def symplectic_spectrum(V: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a (sub-)covariance matrix, ascending.

    Computed as the square roots of the doubly degenerate eigenvalues of
    -(Omega V)^2; the duplicate pairs are merged by averaging adjacent
    sorted values.  Eigenvalues of -(Omega V)^2 scale as ||V||^2, so an
    imaginary residue above 1e-8 * max(1, ||V||_F)^2 signals a broken input
    and raises instead of being discarded.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise SpectrumError(f"covariance matrix must be square of even size, got {V.shape}")
    n = V.shape[0] // 2
    omega_v = symplectic_form(n) @ V
    try:
        ev = np.linalg.eigvals(-omega_v @ omega_v)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigenvalue iteration failed: {exc}") from exc
    tol = 1e-8 * max(1.0, np.linalg.norm(V)) ** 2
    if np.abs(ev.imag).max(initial=0.0) > tol:
        raise SpectrumError(
            f"complex residue {np.abs(ev.imag).max():.3e} in symplectic spectrum")
    nu_doubled = np.sqrt(np.clip(np.sort(ev.real), 0.0, None))
    return 0.5 * (nu_doubled[0::2] + nu_doubled[1::2])


def _as_pair(pair) -> tuple[str, str]:
    flat = []
    for part in pair:
        if isinstance(part, str):
            flat.append(part)
        else:
            flat.extend(part)
    if len(flat) != 2:
        raise ModeSetError(f"expected a pair of single modes, got {pair!r}")
    if flat[0] == flat[1]:
        raise ModeSetError("pair modes must be disjoint")
    return flat[0], flat[1]


def log_negativity(V: np.ndarray, pair) -> float:
    """Logarithmic negativity max[0, -ln 2 nu_-] of a two-mode reduction.

    nu_- is the minimum symplectic eigenvalue after partially transposing
    the second mode of the pair.
    """
    m1, m2 = _as_pair(pair)
    sub = reduce(V, (m1, m2))
    nu = symplectic_spectrum(partial_transpose(sub, (m1, m2), (m2,)))
    return max(0.0, -math.log(2.0 * nu[0]))


def _one_vs_rest_contangle(V: np.ndarray, focus: str, others: tuple[str, ...]) -> float:
    """Squared log-negativity of the focus|rest split of a mode triple."""
    modes = tuple(m for m in MODES if m in {focus, *others})
    sub = reduce(V, modes)
    nu = symplectic_spectrum(partial_transpose(sub, modes, (focus,)))
    return max(0.0, -math.log(2.0 * nu[0])) ** 2


def residual_contangle(V: np.ndarray, focus: str, j: str, k: str) -> float:
    """Raw residual contangle C_focus|jk - C_focus|j - C_focus|k (no floor)."""
    c_joint = _one_vs_rest_contangle(V, focus, (j, k))
    c_j = log_negativity(V, (focus, j)) ** 2
    c_k = log_negativity(V, (focus, k)) ** 2
    return c_joint - c_j - c_k


def residual_contangle_min(V: np.ndarray, triple, floor_tol: float = 1e-9) -> float:
    """Genuine tripartite entanglement: minimum residual contangle.

    The residual is evaluated for each focus of the triple; values inside
    (-floor_tol, 0) are numerical noise and floor to 0, anything more
    negative violates the monogamy inequality and raises.
    """
    triple = _check_modes(triple)
    if len(triple) != 3:
        raise ModeSetError(f"need exactly three modes, got {triple}")
    residuals = []
    for focus in triple:
        j, k = (m for m in triple if m != focus)
        r = residual_contangle(V, focus, j, k)
        if r < -floor_tol:
            raise MonogamyViolationError(
                f"residual contangle {r:.3e} for focus {focus!r} of {triple} "
                f"is below -{floor_tol:.1e}")
        residuals.append(r)
    return max(0.0, min(residuals))


def steering(V: np.ndarray, steering_party, steered_party,
             form: str = "det") -> float:
    """Gaussian steerability of the steered party by the steering party.

    form="det" (default): max[0, (ln det V_A - ln det V_AB - n_B ln 4) / 2],
    which reduces to the familiar single-mode formula
    max[0, ln(det V_A / (4 det V_AB)) / 2] when the steered party is one
    mode.  form="symplectic": sum of -ln 2 nu_j over the symplectic
    eigenvalues of the Schur complement of the steering block that lie
    below 1/2.  The two coincide for a single steered mode.
    """
    A = _check_modes(steering_party)
    B = _check_modes(steered_party)
    if set(A) & set(B):
        raise ModeSetError(f"steering parties overlap: {A} vs {B}")
    sub = reduce(V, A + B)
    na = 2 * len(A)
    block_a = sub[:na, :na]

    if form == "det":
        sign_a, logdet_a = np.linalg.slogdet(block_a)
        sign_ab, logdet_ab = np.linalg.slogdet(sub)
        if sign_a <= 0.0 or sign_ab <= 0.0:
            raise SingularBlockError(
                "non-positive covariance determinant; the input matrix is unphysical")
        return max(0.0, 0.5 * (logdet_a - logdet_ab - len(B) * math.log(4.0)))
    if form == "symplectic":
        cross = sub[:na, na:]
        block_b = sub[na:, na:]
        try:
            schur = block_b - cross.T @ np.linalg.solve(block_a, cross)
        except np.linalg.LinAlgError as exc:
            raise SingularBlockError(f"singular steering-party block: {exc}") from exc
        nu = symplectic_spectrum(schur)
        return sum(-math.log(2.0 * v) for v in nu if v < 0.5)
    raise ValueError(f"unknown steering form {form!r} (use 'det' or 'symplectic')")


def collective_steering(V: np.ndarray, steered: str, form: str = "det",
                        eps: float = EPS_POS) -> float:
    """Collective steering of one mode by the remaining four.

    Nonzero only when no three-mode subset of the steering pool can steer
    the target on its own (each subset steerability <= eps); in that case
    the full four-party steerability is returned.
    """
    (steered,) = _check_modes((steered,))
    pool = tuple(m for m in MODES if m != steered)
    for subset in combinations(pool, 3):
        if steering(V, subset, (steered,), form=form) > eps:
            return 0.0
    return steering(V, pool, (steered,), form=form)


# --- measure registry --------------------------------------------------------

_LABEL_RE = re.compile("|".join(sorted(MODES, key=len, reverse=True)))


def parse_mode_token(token: str) -> tuple[str, ...]:
    """Split a concatenated label token like 'ac1c2b' into mode labels."""
    modes, pos = [], 0
    while pos < len(token):
        match = _LABEL_RE.match(token, pos)
        if match is None:
            raise ModeSetError(f"cannot parse mode token {token!r}")
        modes.append(match.group())
        pos = match.end()
    return _check_modes(modes)


def evaluate_measure(name: str, V: np.ndarray, form: str = "det",
                     eps: float = EPS_POS) -> float:
    """Evaluate a measure by its canonical name (see module docstring)."""
    if name.startswith("E_"):
        pair = parse_mode_token(name[2:])
        if len(pair) != 2:
            raise ModeSetError(f"{name!r}: log-negativity needs a mode pair")
        return log_negativity(V, pair)
    if name.startswith("R_"):
        return residual_contangle_min(V, parse_mode_token(name[2:]))
    if name.startswith("S_c_"):
        lhs, _, rhs = name[4:].partition("_to_")
        pool = parse_mode_token(lhs)
        (target,) = parse_mode_token(rhs)
        expected = tuple(m for m in MODES if m != target)
        if pool != expected:
            raise ModeSetError(
                f"{name!r}: collective steering pool must be all modes but the target")
        return collective_steering(V, target, form=form, eps=eps)
    if name.startswith("S_"):
        lhs, sep, rhs = name[2:].partition("_to_")
        if not sep:
            raise ModeSetError(f"{name!r}: steering names read S_<from>_to_<to>")
        return steering(V, parse_mode_token(lhs), parse_mode_token(rhs), form=form)
    raise ModeSetError(f"unknown measure name {name!r}")


#: Default measure list of a full report: the quantities the parameter maps
#: are built from, in the canonical column order.
DEFAULT_MEASURES = (
    "E_am", "E_c1m", "E_c2m",
    "R_ac2m", "R_ac1m", "R_c1c2m",
    "S_m_to_a", "S_a_to_m",
    "S_m_to_c1", "S_c1_to_m",
    "S_m_to_c2", "S_c2_to_m",
    "S_m_to_b", "S_b_to_m",
    "S_c1_to_mb", "S_mb_to_c1",
    "S_c2_to_mb", "S_mb_to_c2",
    "S_mb_to_c1c2", "S_c1c2_to_mb",
    "S_am_to_c1c2", "S_c1c2_to_am",
    "S_ac1c2_to_m", "S_c1c2b_to_m", "S_ac1b_to_m", "S_ac2b_to_m",
    "S_c_ac1c2b_to_m",
)


@dataclass
class MeasureReport:
    """All requested measures at one operating point plus stability metadata.

    At unstable points every measure is the NaN sentinel (serialized as
    "NaN" in CSV and null in JSON); the stability metadata is always real.
    """

    stable: bool
    marginal: bool
    max_re_lambda: float
    measures: dict[str, float]

    def get(self, name: str) -> float:
        return self.measures[name]


def full_report(V: np.ndarray | None, stability: StabilityReport,
                measures=DEFAULT_MEASURES, form: str = "det",
                eps: float = EPS_POS) -> MeasureReport:
    """Evaluate a measure list on a covariance matrix (sentinels if unstable)."""
    if stability.stable:
        if V is None:
            raise ValueError("stable point but no covariance matrix supplied")
        values = {name: evaluate_measure(name, V, form=form, eps=eps)
                  for name in measures}
    else:
        values = {name: SENTINEL for name in measures}
    return MeasureReport(stable=stability.stable, marginal=stability.marginal,
                         max_re_lambda=stability.max_real_part, measures=values)
