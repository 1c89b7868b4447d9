import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from suther_lax.model import CouplingParams, PhasePoint

settings.register_profile(
    "repo", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("repo")

DEFAULT = CouplingParams(1.0, 1.2, 0.7)


@pytest.fixture
def c_default():
    return DEFAULT


@st.composite
def couplings(draw, kappa=None):
    mag = st.floats(0.5, 2.0)
    sign = st.sampled_from([-1.0, 1.0])
    mu = draw(mag) * draw(sign)
    nu = draw(mag) * draw(sign)
    k = draw(st.floats(-1.0, 1.0)) if kappa is None else kappa
    # nu = -kappa is the only invalid combination here
    if abs(nu + k) < 1e-9:
        k = -k
    return CouplingParams(mu, nu, k)


@st.composite
def points(draw, n=None, gap=0.1, pmax=1.0):
    n = draw(st.integers(1, 3)) if n is None else n
    steps = draw(st.lists(st.floats(gap, gap + 1.0), min_size=n, max_size=n))
    q = np.cumsum(steps)[::-1]
    p = draw(st.lists(st.floats(-pmax, pmax), min_size=n, max_size=n))
    return PhasePoint(q, np.array(p))


def random_algebra_element(rng, n):
    """Y = C A with A anti-Hermitian, which is exactly the u(n, n) condition."""
    N = 2 * n
    M = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    A = M - M.conj().T
    C = np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    return C @ A


# Filled by test_acceptance.py, printed after the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
