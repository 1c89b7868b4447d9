"""Matrix model of u(n, n) and the tensor-product utilities built on it.

Algebra elements are plain ``(N, N)`` complex arrays with ``N = 2n``.  Elements
of g (x) g are ``(N**2, N**2)`` arrays; the pair of matrix units
``e_ij (x) e_kl`` sits at row ``i*N + k`` and column ``j*N + l``, which is
exactly the layout produced by :func:`numpy.kron`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

ATOL = 1e-12

SQRT2 = np.sqrt(2.0)


class AlgebraError(ValueError):
    """Raised when a matrix is not an element of u(n, n)."""


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def build_C(n: int) -> np.ndarray:
    """Return the 2n x 2n block matrix [[0, 1], [1, 0]]."""
    n = _check_n(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]]).astype(complex)


def cartan_q(q) -> np.ndarray:
    """diag(q_1, ..., q_n, -q_1, ..., -q_n)."""
    q = np.asarray(q, dtype=float)
    return np.diag(np.concatenate([q, -q])).astype(complex)


def distinguished_vector(n: int) -> np.ndarray:
    """The column vector E with E_a = -E_{n+a} = 1."""
    n = _check_n(n)
    return np.concatenate([np.ones(n), -np.ones(n)]).astype(complex)


def algebra_defect(Y: np.ndarray) -> float:
    """Max-abs entry of Y* C + C Y."""
    Y = np.asarray(Y)
    N = Y.shape[0]
    if Y.ndim != 2 or Y.shape[1] != N or N % 2:
        raise AlgebraError(f"expected a square matrix of even size, got {Y.shape}")
    C = build_C(N // 2)
    return float(np.max(np.abs(Y.conj().T @ C + C @ Y)))


def is_in_algebra(Y: np.ndarray, atol: float = ATOL) -> bool:
    Y = np.asarray(Y)
    if not np.all(np.isfinite(Y)):
        return False
    return algebra_defect(Y) <= atol * max(1.0, float(np.max(np.abs(Y))))


def check_algebra(Y: np.ndarray, atol: float = ATOL) -> np.ndarray:
    Y = np.asarray(Y, dtype=complex)
    if not is_in_algebra(Y, atol):
        raise AlgebraError("matrix violates Y* C + C Y = 0")
    return Y


def bilinear(Y: np.ndarray, Z: np.ndarray) -> float:
    """The invariant form tr(YZ); real on u(n, n)."""
    Y = np.asarray(Y)
    Z = np.asarray(Z)
    if Y.shape != Z.shape:
        raise ValueError(f"dimension mismatch: {Y.shape} vs {Z.shape}")
    # tr(YZ) without forming the product
    return float(np.real(np.sum(Y * Z.T)))


class Decomposition(NamedTuple):
    m: np.ndarray
    m_perp: np.ndarray
    a: np.ndarray
    a_perp: np.ndarray


def refined_decompose(Y: np.ndarray) -> Decomposition:
    """Split Y into its m, m-perp, a and a-perp components.

    The anti-Hermitian part carries m (diagonal) and m-perp (off-diagonal),
    the Hermitian part carries a and a-perp in the same way.
    """
    Y = check_algebra(Y)
    k = 0.5 * (Y - Y.conj().T)
    p = 0.5 * (Y + Y.conj().T)
    k_diag = np.diag(np.diag(k))
    p_diag = np.diag(np.diag(p))
    return Decomposition(k_diag, k - k_diag, p_diag, p - p_diag)


# --- roots and the adapted basis -------------------------------------------

@dataclass(frozen=True, order=True)
class RootLabel:
    """A positive C_n root; indices are 1-based as in the usual notation.

    kind is ``"diff"`` (e_a - e_b), ``"sum"`` (e_a + e_b) or ``"double"``
    (2 e_c, stored with ``a == b == c``).
    """

    kind: str
    a: int
    b: int

    def __post_init__(self):
        if self.kind not in ("diff", "sum", "double"):
            raise ValueError(f"unknown root kind {self.kind!r}")
        if self.kind == "double":
            if self.a != self.b or self.a < 1:
                raise ValueError("double root needs a == b >= 1")
        elif not 1 <= self.a < self.b:
            raise ValueError(f"root indices must satisfy 1 <= a < b, got {self.a}, {self.b}")

    @classmethod
    def double(cls, c: int) -> "RootLabel":
        return cls("double", c, c)

    def value(self, q) -> float:
        return root_value(self, q)

    def __str__(self):
        if self.kind == "diff":
            return f"e{self.a}-e{self.b}"
        if self.kind == "sum":
            return f"e{self.a}+e{self.b}"
        return f"2e{self.a}"


def positive_roots(n: int) -> list[RootLabel]:
    """Canonical order: differences, then sums (by (a, b)), then doubles."""
    n = _check_n(n)
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    return ([RootLabel("diff", a, b) for a, b in pairs]
            + [RootLabel("sum", a, b) for a, b in pairs]
            + [RootLabel.double(c) for c in range(1, n + 1)])


def root_value(alpha: RootLabel, q) -> float:
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    if max(alpha.a, alpha.b) > n:
        raise ValueError(f"root {alpha} out of range for n={n}")
    a, b = alpha.a - 1, alpha.b - 1
    if alpha.kind == "diff":
        return float(q[a] - q[b])
    if alpha.kind == "sum":
        return float(q[a] + q[b])
    return float(2.0 * q[a])


def _unit(N, i, j):
    m = np.zeros((N, N), dtype=complex)
    m[i, j] = 1.0
    return m


def x_matrix(alpha: RootLabel, sign: str, part: str, n: int) -> np.ndarray:
    """X_alpha^{sign, part} for sign in '+-' and part in 'ri'."""
    N = 2 * n
    s = {"+": 1.0, "-": -1.0}[sign]
    e = lambda i, j: _unit(N, i, j)  # noqa: E731
    a, b = alpha.a - 1, alpha.b - 1
    if alpha.kind == "double":
        if part != "i":
            raise ValueError("2e_c roots only carry the imaginary part")
        return -1j / SQRT2 * (e(a, n + a) + s * e(n + a, a))
    if alpha.kind == "diff":
        if part == "r":
            return 0.5 * (e(a, b) - s * e(b, a) + s * e(n + a, n + b) - e(n + b, n + a))
        return 0.5j * (e(a, b) + s * e(b, a) + s * e(n + a, n + b) + e(n + b, n + a))
    if part == "r":
        return -0.5 * (e(a, n + b) - e(b, n + a) + s * e(n + a, b) - s * e(n + b, a))
    return -0.5j * (e(a, n + b) + e(b, n + a) + s * e(n + a, b) + s * e(n + b, a))


def _parts(alpha: RootLabel) -> tuple[str, ...]:
    return ("i",) if alpha.kind == "double" else ("r", "i")


@dataclass(frozen=True)
class BasisSet:
    """The D^{+-}, X^{+-,eps} basis of u(n, n) together with its dual.

    ``elements[A]`` is T_A and ``duals[A]`` is T^A, so that
    ``bilinear(duals[A], elements[B]) == delta_AB``.  ``labels[A]`` is either
    ``("D", sign, c)`` or ``("X", root, sign, part)``.
    """

    n: int
    labels: tuple
    elements: np.ndarray
    norms: np.ndarray  # <T_A, T_A>, each +1 or -1
    roots: tuple
    z: dict = field(repr=False)
    _index: dict = field(repr=False)

    @property
    def duals(self) -> np.ndarray:
        return self.norms[:, None, None] * self.elements

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def D(self, sign: str, c: int) -> np.ndarray:
        return self.elements[self._index[("D", sign, c)]]

    def X(self, alpha: RootLabel, sign: str, part: str) -> np.ndarray:
        return self.elements[self._index[("X", alpha, sign, part)]]

    def Z(self, alpha: RootLabel) -> np.ndarray:
        return self.z[alpha]

    @property
    def Dplus(self) -> np.ndarray:
        return np.array([self.D("+", c) for c in range(1, self.n + 1)])

    @property
    def Dminus(self) -> np.ndarray:
        return np.array([self.D("-", c) for c in range(1, self.n + 1)])

    def coefficients(self, Y: np.ndarray) -> np.ndarray:
        """Real coordinates <T^A, Y> of Y in this basis."""
        Y = np.asarray(Y)
        return np.real(np.einsum("aij,ji->a", self.duals, Y))

    def expand(self, coeffs) -> np.ndarray:
        return np.einsum("a,aij->ij", np.asarray(coeffs, dtype=float), self.elements)


_BASIS_CACHE: dict[int, BasisSet] = {}


def build_basis(n: int) -> BasisSet:
    """Assemble the adapted basis in canonical order (cached per n)."""
    n = _check_n(n)
    if n in _BASIS_CACHE:
        return _BASIS_CACHE[n]
    N = 2 * n
    labels, mats, norms = [], [], []
    for c in range(1, n + 1):
        labels.append(("D", "+", c))
        mats.append(1j / SQRT2 * (_unit(N, c - 1, c - 1) + _unit(N, n + c - 1, n + c - 1)))
        norms.append(-1.0)
    for c in range(1, n + 1):
        labels.append(("D", "-", c))
        mats.append(1.0 / SQRT2 * (_unit(N, c - 1, c - 1) - _unit(N, n + c - 1, n + c - 1)))
        norms.append(1.0)
    roots = positive_roots(n)
    for alpha in roots:
        for sign in "+-":
            for part in _parts(alpha):
                labels.append(("X", alpha, sign, part))
                mats.append(x_matrix(alpha, sign, part, n))
                norms.append(-1.0 if sign == "+" else 1.0)
    index = {lab: i for i, lab in enumerate(labels)}
    elements = np.array(mats)
    elements.setflags(write=False)
    dplus = {c: elements[index[("D", "+", c)]] for c in range(1, n + 1)}
    z = {}
    for alpha in roots:
        if alpha.kind == "double":
            z[alpha] = dplus[alpha.a]
        else:
            z[alpha] = (dplus[alpha.a] + dplus[alpha.b]) / SQRT2
    norms_arr = np.array(norms)
    norms_arr.setflags(write=False)
    basis = BasisSet(n, tuple(labels), elements, norms_arr, tuple(roots), z, index)
    _BASIS_CACHE[n] = basis
    return basis


def gram_matrix(basis: BasisSet) -> np.ndarray:
    E = basis.elements
    return np.real(np.einsum("aij,bji->ab", E, E))


# --- tensor products ------------------------------------------------------

def kron(Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y)
    Z = np.asarray(Z)
    if Y.shape != Z.shape or Y.ndim != 2:
        raise ValueError(f"dimension mismatch: {Y.shape} vs {Z.shape}")
    return np.kron(Y, Z)


def _tensor_dim(T: np.ndarray) -> int:
    T = np.asarray(T)
    N = int(round(np.sqrt(T.shape[0])))
    if T.ndim != 2 or T.shape[0] != T.shape[1] or N * N != T.shape[0]:
        raise ValueError(f"not a tensor square matrix: shape {T.shape}")
    return N


def swap(T: np.ndarray) -> np.ndarray:
    """Exchange the two tensor factors: swap(A (x) B) = B (x) A."""
    N = _tensor_dim(T)
    return np.asarray(T).reshape(N, N, N, N).transpose(1, 0, 3, 2).reshape(N * N, N * N)


def partial_trace_2(T: np.ndarray) -> np.ndarray:
    """tr_2(A (x) B) = tr(B) A, extended linearly."""
    N = _tensor_dim(T)
    return np.einsum("ikjk->ij", np.asarray(T).reshape(N, N, N, N))


def embed_1(Y: np.ndarray) -> np.ndarray:
    """Y (x) 1."""
    return np.kron(Y, np.eye(Y.shape[0]))


def embed_2(Y: np.ndarray) -> np.ndarray:
    """1 (x) Y."""
    return np.kron(np.eye(Y.shape[0]), Y)


def casimir(n: int) -> np.ndarray:
    """Omega_12 = sum_A T_A (x) T^A."""
    basis = build_basis(n)
    return tensor_sum(basis.norms, basis.elements, basis.elements)


def tensor_sum(coeffs, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """sum_k coeffs[k] * left[k] (x) right[k] for stacks of (N, N) matrices."""
    left = np.asarray(left)
    right = np.asarray(right)
    K, N, _ = left.shape
    out = np.einsum("k,kij,kab->iajb", np.asarray(coeffs), left, right)
    return out.reshape(N * N, N * N)
