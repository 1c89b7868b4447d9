import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from suther_lax.liealg import (
    AlgebraError,
    RootLabel,
    bilinear,
    build_basis,
    build_C,
    cartan_q,
    casimir,
    check_algebra,
    gram_matrix,
    is_in_algebra,
    kron,
    partial_trace_2,
    positive_roots,
    refined_decompose,
    root_value,
    swap,
    x_matrix,
)

from conftest import random_algebra_element

S2 = math.sqrt(2.0)


def e(N, i, j):
    m = np.zeros((N, N), dtype=complex)
    m[i, j] = 1
    return m


def chamber_q(rng, n):
    return np.cumsum(rng.uniform(0.1, 1.1, n))[::-1]


# --- C and the form ---------------------------------------------------------

def test_C_n1():
    assert np.array_equal(build_C(1), np.array([[0, 1], [1, 0]]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_C_involutive_and_hermitian(n):
    C = build_C(n)
    assert np.array_equal(C @ C, np.eye(2 * n))
    assert np.array_equal(C, C.conj().T)


def test_C_rejects_zero():
    with pytest.raises(ValueError):
        build_C(0)


def test_bilinear_on_D():
    b = build_basis(3)
    for c in (1, 2, 3):
        assert bilinear(b.D("+", c), b.D("+", c)) == pytest.approx(-1, abs=1e-15)
        assert bilinear(b.D("-", c), b.D("-", c)) == pytest.approx(1, abs=1e-15)


def test_bilinear_X_plus_minus_orthogonal():
    b = build_basis(3)
    for (la, A), (lb, B) in itertools.product(zip(b.labels, b.elements), repeat=2):
        if la[0] == "X" and lb[0] == "X" and la[2] == "+" and lb[2] == "-":
            assert abs(bilinear(A, B)) < 1e-15


def test_bilinear_dimension_mismatch():
    with pytest.raises(ValueError):
        bilinear(np.eye(2), np.eye(4))


def test_algebra_membership():
    rng = np.random.default_rng(0)
    Y = random_algebra_element(rng, 2)
    assert is_in_algebra(Y)
    assert not is_in_algebra(np.eye(4))
    with pytest.raises(AlgebraError):
        check_algebra(np.eye(4))


# --- refined decomposition --------------------------------------------------

def test_decompose_Q():
    Q = cartan_q([1.5, 0.4])
    m, mp, a, ap = refined_decompose(Q)
    assert np.allclose(a, Q, atol=0) and not m.any() and not mp.any() and not ap.any()


def test_decompose_Dplus():
    D = build_basis(2).D("+", 1)
    m, mp, a, ap = refined_decompose(D)
    assert np.array_equal(m, D) and not mp.any() and not a.any() and not ap.any()


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_decompose_properties(seed, n):
    Y = random_algebra_element(np.random.default_rng(seed), n)
    parts = refined_decompose(Y)
    assert np.max(np.abs(sum(parts) - Y)) < 1e-14
    m, mp, a, ap = parts
    for K in (m, mp):
        assert np.allclose(K, -K.conj().T, atol=1e-15)
    for P in (a, ap):
        assert np.allclose(P, P.conj().T, atol=1e-15)
    assert not np.diag(mp).any() and not np.diag(ap).any()
    assert np.count_nonzero(m - np.diag(np.diag(m))) == 0
    for X, Z in itertools.combinations(parts, 2):
        assert abs(bilinear(X, Z)) < 1e-12
    # idempotent: each piece decomposes to itself
    for k, part in enumerate(parts):
        again = refined_decompose(part)
        assert np.max(np.abs(again[k] - part)) < 1e-15


def test_decompose_rejects_outside():
    with pytest.raises(AlgebraError):
        refined_decompose(np.eye(2))


# --- roots and basis --------------------------------------------------------

def test_root_values():
    assert root_value(RootLabel("diff", 1, 2), [2.0, 0.5]) == 1.5
    assert root_value(RootLabel.double(1), [0.7]) == pytest.approx(1.4)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
def test_roots_positive_in_chamber(seed, n):
    q = chamber_q(np.random.default_rng(seed), n)
    assert all(root_value(a, q) > 0 for a in positive_roots(n))


def test_root_label_validation():
    with pytest.raises(ValueError):
        RootLabel("diff", 2, 1)
    with pytest.raises(ValueError):
        RootLabel("double", 1, 2)
    with pytest.raises(ValueError):
        RootLabel("cube", 1, 2)


def test_basis_n1_explicit():
    """Basis matrices written out by hand for n = 1 (N = 2)."""
    b = build_basis(1)
    assert len(b) == 4
    expected = {
        ("D", "+", 1): 1j / S2 * np.eye(2),
        ("D", "-", 1): 1 / S2 * np.diag([1, -1]),
        ("X", RootLabel.double(1), "+", "i"): -1j / S2 * (e(2, 0, 1) + e(2, 1, 0)),
        ("X", RootLabel.double(1), "-", "i"): -1j / S2 * (e(2, 0, 1) - e(2, 1, 0)),
    }
    assert set(b.labels) == set(expected)
    for lab, M in expected.items():
        assert np.allclose(b.elements[b.index(lab)], M, atol=1e-16)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_basis_size_and_membership(n):
    b = build_basis(n)
    assert len(b) == 4 * n * n
    for Y in b.elements:
        assert is_in_algebra(Y)


def test_canonical_order_n2():
    b = build_basis(2)
    head = b.labels[:4]
    assert head == (("D", "+", 1), ("D", "+", 2), ("D", "-", 1), ("D", "-", 2))
    d12 = RootLabel("diff", 1, 2)
    assert b.labels[4:8] == tuple(("X", d12, s, p) for s in "+-" for p in "ri")
    assert b.labels[-2:] == (("X", RootLabel.double(2), "+", "i"), ("X", RootLabel.double(2), "-", "i"))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_gram_matrix(n):
    b = build_basis(n)
    want = np.diag([-1.0 if (lab[1] if lab[0] == "D" else lab[2]) == "+" else 1.0 for lab in b.labels])
    assert np.max(np.abs(gram_matrix(b) - want)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_duals(n):
    b = build_basis(n)
    G = np.real(np.einsum("aij,bji->ab", b.duals, b.elements))
    assert np.max(np.abs(G - np.eye(len(b)))) < 1e-12


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_completeness(seed, n):
    Y = random_algebra_element(np.random.default_rng(seed), n)
    b = build_basis(n)
    assert np.max(np.abs(b.expand(b.coefficients(Y)) - Y)) < 1e-12


@given(st.integers(0, 2 ** 32 - 1))
def test_cartan_commutation_n3(seed):
    b = build_basis(3)
    q = chamber_q(np.random.default_rng(seed), 3)
    Q = cartan_q(q)
    flip = {"+": "-", "-": "+"}
    for lab in b.labels:
        if lab[0] != "X":
            continue
        _, alpha, s, part = lab
        X = b.X(alpha, s, part)
        lhs = Q @ X - X @ Q
        assert np.max(np.abs(lhs - alpha.value(q) * b.X(alpha, flip[s], part))) < 1e-12


def test_x_matrix_double_root_has_no_real_part():
    with pytest.raises(ValueError):
        x_matrix(RootLabel.double(1), "+", "r", 1)


def test_z_elements():
    b = build_basis(3)
    for alpha in b.roots:
        if alpha.kind == "double":
            assert np.array_equal(b.Z(alpha), b.D("+", alpha.a))
        else:
            want = (b.D("+", alpha.a) + b.D("+", alpha.b)) / S2
            assert np.allclose(b.Z(alpha), want, atol=1e-16)


def test_basis_is_read_only():
    b = build_basis(2)
    with pytest.raises(ValueError):
        b.elements[0, 0, 0] = 1.0


# --- tensors ----------------------------------------------------------------

def test_kron_index_convention():
    rng = np.random.default_rng(1)
    N = 4
    A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    B = rng.normal(size=(N, N))
    T = kron(A, B)
    for i, j, k, l in itertools.product(range(N), repeat=4):
        assert T[i * N + k, j * N + l] == A[i, j] * B[k, l]


def test_kron_mismatch():
    with pytest.raises(ValueError):
        kron(np.eye(2), np.eye(4))


def test_partial_trace_and_swap():
    rng = np.random.default_rng(2)
    A, B = rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))
    assert np.allclose(partial_trace_2(kron(A, B)), np.trace(B) * A, atol=1e-15)
    assert np.max(np.abs(swap(kron(A, B)) - kron(B, A))) < 1e-15
    T = rng.normal(size=(16, 16))
    assert np.array_equal(swap(swap(T)), T)


def test_partial_trace_rejects_non_square():
    with pytest.raises(ValueError):
        partial_trace_2(np.zeros((6, 6)))


def test_casimir_symmetric():
    Om = casimir(2)
    assert np.max(np.abs(swap(Om) - Om)) < 1e-15


def test_casimir_reproducing():
    rng = np.random.default_rng(3)
    Om = casimir(2)
    for _ in range(20):
        Y = random_algebra_element(rng, 2)
        got = partial_trace_2(Om @ np.kron(np.eye(4), Y))
        assert np.max(np.abs(got - Y)) < 1e-12


def test_casimir_n1_explicit():
    b = build_basis(1)
    Dp, Dm = b.D("+", 1), b.D("-", 1)
    a = RootLabel.double(1)
    Xp, Xm = b.X(a, "+", "i"), b.X(a, "-", "i")
    want = -np.kron(Dp, Dp) + np.kron(Dm, Dm) - np.kron(Xp, Xp) + np.kron(Xm, Xm)
    assert np.max(np.abs(casimir(1) - want)) < 1e-15
