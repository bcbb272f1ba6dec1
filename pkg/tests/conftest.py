import numpy as np
import pytest

from omm_qcorr import dynamics
from omm_qcorr.sweep import fig2_baseline, fig4_base


@pytest.fixture(scope="session")
def baseline():
    return fig2_baseline()


@pytest.fixture(scope="session")
def control_base():
    return fig4_base()


@pytest.fixture(scope="session")
def baseline_cm(baseline):
    """Stationary covariance matrix at the baseline operating point."""
    A = dynamics.build_drift(baseline)
    D = dynamics.build_diffusion(baseline)
    rep = dynamics.stability(A, omega_b=baseline.omega_b)
    assert rep.stable
    return dynamics.steady_covariance(A, D, rep)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
