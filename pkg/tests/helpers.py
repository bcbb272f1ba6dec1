"""Shared test utilities: analytic covariance matrices and closed-form oracles.

The oracles here are intentionally independent of the package internals:
two-mode symplectic eigenvalues come from the determinant closed form, and
reference states (thermal, two-mode squeezed vacuum) are written down
directly from their textbook covariance matrices.
"""

import math

import numpy as np

from omm_qcorr.model import MODES


def vacuum_cm(n_modes: int = 5) -> np.ndarray:
    return 0.5 * np.eye(2 * n_modes)


def tmsv_cm(r: float) -> np.ndarray:
    """Two-mode squeezed vacuum: diag blocks cosh(2r)/2, cross sinh(2r)/2 * Z."""
    c = 0.5 * math.cosh(2.0 * r)
    s = 0.5 * math.sinh(2.0 * r)
    Z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * Z], [s * Z, c * np.eye(2)]])


def two_mode_nu_closed(V: np.ndarray) -> tuple[float, float]:
    """Closed-form symplectic eigenvalues (nu_minus, nu_plus) of a 4x4 CM."""
    A = np.linalg.det(V[:2, :2])
    B = np.linalg.det(V[2:, 2:])
    C = np.linalg.det(V[:2, 2:])
    delta = A + B + 2.0 * C
    disc = math.sqrt(max(delta ** 2 - 4.0 * np.linalg.det(V), 0.0))
    nu_minus = math.sqrt(max((delta - disc) / 2.0, 0.0))
    nu_plus = math.sqrt((delta + disc) / 2.0)
    return nu_minus, nu_plus


def logneg_closed(V: np.ndarray) -> float:
    """Two-mode log-negativity from the partial-transpose closed form."""
    Vpt = V.copy()
    P = np.diag([1.0, 1.0, 1.0, -1.0])
    nu_minus, _ = two_mode_nu_closed(P @ Vpt @ P)
    return max(0.0, -math.log(2.0 * nu_minus))


def _rot2(phi: float) -> np.ndarray:
    return np.array([[math.cos(phi), math.sin(phi)],
                     [-math.sin(phi), math.cos(phi)]])


def random_two_mode_cm(rng: np.random.Generator) -> np.ndarray:
    """Random physical two-mode CM: thermal core + random symplectic dressing."""
    n1, n2 = rng.uniform(0.0, 1.5, size=2)
    V = np.diag([n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5])

    def local(phi1, phi2):
        S = np.zeros((4, 4))
        S[:2, :2] = _rot2(phi1)
        S[2:, 2:] = _rot2(phi2)
        return S

    r = rng.uniform(0.0, 1.0)
    Z = np.diag([1.0, -1.0])
    tms = np.block([[math.cosh(r) * np.eye(2), math.sinh(r) * Z],
                    [math.sinh(r) * Z, math.cosh(r) * np.eye(2)]])
    chi = rng.uniform(0.0, 2.0 * math.pi)
    bs = np.block([[math.cos(chi) * np.eye(2), math.sin(chi) * np.eye(2)],
                   [-math.sin(chi) * np.eye(2), math.cos(chi) * np.eye(2)]])
    S = local(*rng.uniform(0, 2 * math.pi, 2)) @ bs @ tms \
        @ local(*rng.uniform(0, 2 * math.pi, 2))
    V = S @ V @ S.T
    return 0.5 * (V + V.T)


def embed_two_mode(V4: np.ndarray, mode1: str, mode2: str) -> np.ndarray:
    """Place a two-mode CM on (mode1, mode2) of an otherwise-vacuum 10x10 CM."""
    V = vacuum_cm()
    i = 2 * MODES.index(mode1)
    j = 2 * MODES.index(mode2)
    V[i:i + 2, i:i + 2] = V4[:2, :2]
    V[j:j + 2, j:j + 2] = V4[2:, 2:]
    V[i:i + 2, j:j + 2] = V4[:2, 2:]
    V[j:j + 2, i:i + 2] = V4[2:, :2]
    return V


def mode_sign_flip(mode: str) -> np.ndarray:
    """Local symplectic flipping both quadratures of one mode (10x10)."""
    S = np.eye(10)
    i = 2 * MODES.index(mode)
    S[i, i] = S[i + 1, i + 1] = -1.0
    return S
