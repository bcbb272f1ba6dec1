"""Drift/diffusion matrices, stability, and the stationary covariance matrix.

The linearized quadrature fluctuations obey du/dt = A u + n(t).  A is built
block-by-block in the fixed mode order (a, c1, c2, m, b); the stationary
covariance matrix V of a stable point solves the Lyapunov equation
A V + V A^T = -D with D the diagonal diffusion matrix of the input noises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .model import EffectiveParams, thermal_occupation

N_QUAD = 10


class EigendecompositionError(RuntimeError):
    """The dense eigenvalue iteration failed to converge."""


class UnstablePointError(RuntimeError):
    """The stationary covariance matrix was requested at an unstable point."""

    def __init__(self, message, max_real_part=None):
        super().__init__(message)
        self.max_real_part = max_real_part


class LyapunovError(RuntimeError):
    """The Lyapunov solve did not reach the required residual."""


@dataclass(frozen=True)
class StabilityReport:
    """Spectral stability summary of a drift matrix."""

    stable: bool
    max_real_part: float        # rad/s
    spectrum: np.ndarray        # full complex spectrum, unordered
    marginal: bool = False      # |max Re| below 1e-6 * omega_b (if known)


def _rotation_block(damping: float, detuning: float) -> np.ndarray:
    return np.array([[-damping, detuning], [-detuning, -damping]])


def build_drift(p: EffectiveParams) -> np.ndarray:
    """Assemble the 10x10 drift matrix of the linearized dynamics.

    Zero blocks are structural: the atom couples only to the vertical cavity
    polarization (exchange, weight |sin theta|), each cavity polarization and
    the magnon couple only to the phonon (weights G_c cos/sin theta and G_m),
    and there is no direct optical-optical or optical-magnon coupling.
    """
    th = p.theta
    tc = p.g_ac2 * abs(math.sin(th))
    gc1 = p.G_c * math.cos(th)
    gc2 = p.G_c * math.sin(th)

    A = np.zeros((N_QUAD, N_QUAD))
    a, c1, c2, m, b = (slice(2 * i, 2 * i + 2) for i in range(5))

    A[a, a] = _rotation_block(p.gamma_a, p.delta_a)
    A[c1, c1] = _rotation_block(p.kappa_c1, p.delta_c)
    A[c2, c2] = _rotation_block(p.kappa_c2, p.delta_c)
    A[m, m] = _rotation_block(p.kappa_m, p.delta_m)
    A[b, b] = np.array([[0.0, p.omega_b], [-p.omega_b, -p.gamma_b]])

    # atom <-> c2 exchange; the same block appears on both sides
    exchange = np.array([[0.0, tc], [-tc, 0.0]])
    A[a, c2] = exchange
    A[c2, a] = exchange

    # radiation-pressure-type couplings to the mechanical mode
    A[c1, b] = np.array([[-gc1, 0.0], [0.0, 0.0]])
    A[b, c1] = np.array([[0.0, 0.0], [0.0, gc1]])
    A[c2, b] = np.array([[-gc2, 0.0], [0.0, 0.0]])
    A[b, c2] = np.array([[0.0, 0.0], [0.0, gc2]])
    A[m, b] = np.array([[p.G_m, 0.0], [0.0, 0.0]])
    A[b, m] = np.array([[0.0, 0.0], [0.0, -p.G_m]])
    return A


def build_diffusion(p: EffectiveParams) -> np.ndarray:
    """Diagonal diffusion matrix of the input noises.

    The magnon and phonon channels carry thermal occupations at temperature
    T; the position row q has no direct noise input.
    """
    n_m = thermal_occupation(p.omega_m, p.T)
    n_b = thermal_occupation(p.omega_b, p.T)
    return np.diag([
        p.gamma_a, p.gamma_a,
        p.kappa_c1, p.kappa_c1,
        p.kappa_c2, p.kappa_c2,
        p.kappa_m * (2.0 * n_m + 1.0), p.kappa_m * (2.0 * n_m + 1.0),
        0.0, p.gamma_b * (2.0 * n_b + 1.0),
    ])


def stability(A: np.ndarray, omega_b: float | None = None) -> StabilityReport:
    """Classify a drift matrix: stable iff every eigenvalue has Re < 0.

    Uses the dense general-matrix eigenvalue routine (Hessenberg reduction
    plus shifted QR).  When ``omega_b`` is given, points with
    |max Re| < 1e-6 * omega_b are additionally flagged as marginal so that
    sweep maps can hatch near-boundary cells.
    """
    try:
        spectrum = np.linalg.eigvals(np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionError(f"eigenvalue iteration failed: {exc}") from exc
    max_real = float(spectrum.real.max())
    marginal = bool(omega_b is not None and abs(max_real) < 1e-6 * omega_b)
    return StabilityReport(stable=max_real < 0.0, max_real_part=max_real,
                           spectrum=spectrum, marginal=marginal)


def lyapunov_residual(A: np.ndarray, V: np.ndarray, D: np.ndarray) -> float:
    """Relative Frobenius residual ||A V + V A^T + D|| / ||D||."""
    num = np.linalg.norm(A @ V + V @ A.T + D)
    den = np.linalg.norm(D)
    return float(num / den) if den > 0.0 else float(num)


def steady_covariance(A: np.ndarray, D: np.ndarray,
                      report: StabilityReport | None = None,
                      residual_tol: float = 1e-10) -> np.ndarray:
    """Solve A V + V A^T = -D for the stationary covariance matrix.

    The equation is vectorized as (A (x) I + I (x) A) vec(V) = -vec(D) and
    solved with one dense LU factorization; a few steps of iterative
    refinement with the same factors push the relative residual well below
    ``residual_tol``.  The output is exactly symmetric.  Calling this at an
    unstable point raises UnstablePointError.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    if report is None:
        report = stability(A)
    if not report.stable:
        raise UnstablePointError(
            f"no stationary covariance: max Re(eig A) = {report.max_real_part:.6e} >= 0",
            max_real_part=report.max_real_part)

    n = A.shape[0]
    scale = np.abs(A).max()   # common rescaling of A and D leaves V unchanged
    As = A / scale
    Ds = D / scale
    eye = np.eye(n)
    lu = lu_factor(np.kron(As, eye) + np.kron(eye, As))
    V = lu_solve(lu, -Ds.ravel()).reshape(n, n)
    V = 0.5 * (V + V.T)

    for _ in range(5):
        R = As @ V + V @ As.T + Ds
        if np.linalg.norm(R) <= 1e-14 * np.linalg.norm(Ds):
            break
        correction = lu_solve(lu, -R.ravel()).reshape(n, n)
        V = V + 0.5 * (correction + correction.T)

    res = lyapunov_residual(A, V, D)
    if not res < residual_tol:
        raise LyapunovError(
            f"Lyapunov residual {res:.3e} exceeds tolerance {residual_tol:.1e}")
    return V
