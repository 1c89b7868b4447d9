import numpy as np
import pytest
from hypothesis import given

from suther_lax.model import CouplingParams, PhasePoint, lax_matrix, r_dynamical_part, r_matrix_standard
from suther_lax.poisson import (
    Observable,
    canonical_bracket,
    coordinate,
    involution_matrix,
    involution_residual,
    involution_scale,
    lax_partials,
    lax_partials_fd,
    lax_tensor_bracket,
    rmatrix_identity_residual,
    trace_power,
    trace_power_gradients,
)

from conftest import couplings, points

X2 = PhasePoint([1.3, 0.4], [0.2, -0.7])


def test_canonical_pairs():
    q0, p0, p1 = coordinate("q", 0), coordinate("p", 0), coordinate("p", 1)
    assert canonical_bracket(q0, p0, X2) == 1
    assert canonical_bracket(p0, q0, X2) == -1
    assert canonical_bracket(q0, p1, X2) == 0
    assert canonical_bracket(q0, q0, X2) == 0


def test_bracket_q_with_function():
    # {q_1, p_1^2 / 2} = p_1
    f = Observable(lambda x: 0.5 * x.p[0] ** 2)
    assert canonical_bracket(coordinate("q", 0), f, X2) == pytest.approx(0.2, abs=1e-9)


def test_bracket_fd_disabled():
    f = Observable(lambda x: x.q[0] * x.p[1])
    with pytest.raises(ValueError):
        canonical_bracket(f, coordinate("q", 0), X2, allow_fd=False)
    with pytest.raises(ValueError):
        coordinate("r", 0)


@given(points(), couplings())
def test_lax_partials_match_fd(x, c):
    dq, dp = lax_partials(x, c)
    fq, fp = lax_partials_fd(x, c)
    assert np.max(np.abs(dq - fq)) < 1e-6 * max(1.0, np.max(np.abs(dq)))
    assert np.max(np.abs(dp - fp)) < 1e-8


def test_lax_p_partial_n1(c_default):
    _, dp = lax_partials(PhasePoint([0.5], [0.1]), c_default)
    assert np.array_equal(dp[0], np.diag([1.0, -1.0]))


def test_lax_q_partial_diagonal_is_zero(c_default):
    dq, _ = lax_partials(X2, c_default)
    for d in dq:
        assert not np.diag(d).any()


@given(points(), couplings())
def test_tensor_bracket_antisymmetric(x, c):
    from suther_lax.liealg import swap
    T = lax_tensor_bracket(x, c)
    assert np.max(np.abs(T + swap(T))) < 1e-12


def test_tensor_bracket_entry_by_entry(c_default):
    """{L_ij, L_kl} from the scalar bracket of individual entries."""
    x = PhasePoint([0.9], [0.3])
    T = lax_tensor_bracket(x, c_default)
    N = 2
    for i in range(N):
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    f = Observable(lambda y, i=i, j=j: lax_matrix(y, c_default)[i, j])
                    g = Observable(lambda y, k=k, l=l: lax_matrix(y, c_default)[k, l])
                    assert abs(canonical_bracket(f, g, x) - T[i * N + k, j * N + l]) < 1e-7


def test_tensor_bracket_unknown_method(c_default):
    with pytest.raises(ValueError):
        lax_tensor_bracket(X2, c_default, method="spline")


def test_identity_n1(c_default):
    x = PhasePoint([0.7], [0.4])
    rep = rmatrix_identity_residual(x, c_default, r_matrix_standard(x.q), seed=3)
    assert rep.residual_max < 1e-9 and rep.method == "analytic" and rep.seed == 3


def test_identity_n3_both_methods():
    c = CouplingParams(-0.8, 1.7, -0.3)
    x = PhasePoint([2.1, 1.2, 0.25], [0.5, -0.1, 0.9])
    r = r_matrix_standard(x.q)
    assert rmatrix_identity_residual(x, c, r).residual_max < 1e-8
    fd = rmatrix_identity_residual(x, c, r, method="fd")
    assert fd.residual_max < 1e-5 and fd.method == "finite-difference"


@given(points(), couplings())
def test_identity_property(x, c):
    assert rmatrix_identity_residual(x, c, r_matrix_standard(x.q)).residual_max < 1e-8


@given(points(), couplings(kappa=0.0))
def test_cn_truncation_holds_at_kappa_zero(x, c):
    assert rmatrix_identity_residual(x, c, r_dynamical_part(x.q)).residual_max < 1e-8


def test_cn_truncation_fails_at_nonzero_kappa():
    x = PhasePoint([1.1, 0.5], [0.3, 0.2])
    c = CouplingParams(1.0, 1.2, 0.5)
    assert rmatrix_identity_residual(x, c, r_dynamical_part(x.q)).residual_max > 1e-3


def test_trace_gradients_extended_vs_double(c_default):
    ext = trace_power_gradients(X2, c_default, 4)
    dbl = trace_power_gradients(X2, c_default, 4, precision="double")
    for (eq, ep), (dq, dp) in zip(ext, dbl):
        assert np.max(np.abs(np.array(eq, dtype=complex) - dq)) < 1e-10
        assert np.max(np.abs(np.array(ep, dtype=complex) - dp)) < 1e-10
    with pytest.raises(ValueError):
        trace_power_gradients(X2, c_default, 2, precision="quad")


def test_trace_power_gradient_vs_fd(c_default):
    obs = trace_power(3, c_default)
    gq, gp = obs.gradient(X2)
    fq, fp = obs.fd_gradient(X2)
    assert np.max(np.abs(gq - fq)) < 1e-6 and np.max(np.abs(gp - fp)) < 1e-6


def test_trace_two_is_four_h(c_default):
    from suther_lax.model import hamiltonian
    assert trace_power(2, c_default)(X2) == pytest.approx(4 * hamiltonian(X2, c_default), abs=1e-12)


def test_involution_examples(c_default):
    x = PhasePoint([1.0, 0.5], [0.3, -0.2])
    assert involution_residual(x, c_default, 2, 4) < 1e-9
    m = involution_matrix(x, c_default)
    assert m.shape == (4, 4) and np.max(m) < 1e-9
    with pytest.raises(ValueError):
        involution_residual(x, c_default, 1, 5)


def test_involution_non_commuting_control(c_default):
    # sanity: the bracket machinery is not identically zero
    x = PhasePoint([1.0, 0.5], [0.3, -0.2])
    assert abs(canonical_bracket(trace_power(2, c_default), coordinate("q", 0), x)) > 0.1


def test_double_precision_floor_tracks_scale():
    c = CouplingParams(2.0, -1.9, 0.9)
    x = PhasePoint([0.35, 0.22, 0.1], [0.8, -0.9, 0.5])
    dbl = involution_matrix(x, c, precision="double")
    ext = involution_matrix(x, c)
    assert np.max(ext) < 1e-9
    for j in range(1, 7):
        for k in range(j + 1, 7):
            assert dbl[j - 1, k - 1] <= 1e-13 * involution_scale(x, c, j, k)
