"""Couplings, phase-space points and the Lax-pair / r-matrix objects of the
hyperbolic BC_n Sutherland model.

Most functions come in pairs built along independent routes (entrywise
formulas vs. expansions in the adapted basis) so each can check the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .liealg import (
    SQRT2,
    BasisSet,
    RootLabel,
    build_basis,
    build_C,
    check_algebra,
    embed_2,
    partial_trace_2,
    root_value,
)

MIN_GAP = 1e-8


class CouplingError(ValueError):
    """Invalid coupling constants."""


class ChamberError(ValueError):
    """A position vector outside the open Weyl chamber (or too close to a wall)."""


class ConsistencyError(RuntimeError):
    """Two constructions that must agree did not."""


@dataclass(frozen=True)
class CouplingParams:
    """The reduction parameters (mu, nu, kappa).

    The Hamiltonian couplings follow as g^2 = mu^2, g1^2 = nu kappa / 2 and
    g2^2 = (nu - kappa)^2 / 2.
    """

    mu: float
    nu: float
    kappa: float

    def __post_init__(self):
        for name in ("mu", "nu", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise CouplingError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.mu == 0.0:
            raise CouplingError("mu must be a non-zero real number")
        if self.nu == 0.0:
            raise CouplingError("nu must be a non-zero real number")
        if not self.g1sq > -0.25 * self.g2sq:
            raise CouplingError(
                f"derived couplings violate g1^2 > -g2^2/4 (g1^2={self.g1sq}, g2^2={self.g2sq})")

    @property
    def g2(self) -> float:
        return self.mu ** 2

    @property
    def g1sq(self) -> float:
        return 0.5 * self.nu * self.kappa

    @property
    def g2sq(self) -> float:
        return 0.5 * (self.nu - self.kappa) ** 2

    @property
    def derived(self) -> tuple[float, float, float]:
        return self.g2, self.g1sq, self.g2sq


def make_couplings(mu: float, nu: float, kappa: float) -> CouplingParams:
    return CouplingParams(mu, nu, kappa)


def chamber_gap(q) -> float:
    """min(q_n, q_c - q_{c+1}): the distance to the nearest chamber wall."""
    q = np.asarray(q, dtype=float)
    if q.shape[0] == 1:
        return float(q[0])
    return float(min(q[-1], np.min(q[:-1] - q[1:])))


def check_chamber(q, min_gap: float = MIN_GAP) -> np.ndarray:
    q = np.ascontiguousarray(q, dtype=float)
    if q.ndim != 1 or q.shape[0] < 1:
        raise ChamberError(f"q must be a non-empty vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ChamberError("q has non-finite entries")
    gap = chamber_gap(q)
    if not gap >= min_gap:
        raise ChamberError(
            f"q={q.tolist()} is not in the open chamber q_1 > ... > q_n > 0 "
            f"with margin {min_gap:g} (gap {gap:g})")
    return q


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = check_chamber(self.q)
        p = np.ascontiguousarray(self.p, dtype=float)
        if p.shape != q.shape:
            raise ValueError(f"q and p must have the same length, got {q.shape} and {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("p has non-finite entries")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PhasePoint):
            return NotImplemented
        return np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p)

    __hash__ = None


# --- Hamiltonian ------------------------------------------------------------

def hamiltonian(x: PhasePoint, c: CouplingParams) -> float:
    return float(kernels.hamiltonian(x.q, x.p, c.g2, c.g1sq, c.g2sq))


def grad_q_hamiltonian(q, c: CouplingParams) -> np.ndarray:
    """Analytic dH/dq (the momentum part of H does not depend on q)."""
    q = check_chamber(q)
    return kernels.grad_q_hamiltonian(q, c.g2, c.g1sq, c.g2sq)


# --- Lax matrix -------------------------------------------------------------

@dataclass(frozen=True)
class LaxMatrix:
    """L split into its Hermitian part and the central term -kappa i C."""

    value: np.ndarray
    hermitian_part: np.ndarray
    central_part: np.ndarray

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """The n x n blocks (A, B) of the Hermitian part [[A, B], [-B, -A]]."""
        n = self.value.shape[0] // 2
        return self.hermitian_part[:n, :n], self.hermitian_part[:n, n:]


def lax_matrix(x: PhasePoint, c: CouplingParams) -> np.ndarray:
    """L(q, p) assembled entrywise."""
    return kernels.lax_matrix(x.q, x.p, c.mu, c.nu, c.kappa)


def lax_parts(x: PhasePoint, c: CouplingParams) -> LaxMatrix:
    L = lax_matrix(x, c)
    central = -1j * c.kappa * build_C(x.n)
    return LaxMatrix(L, L - central, central)


def lax_via_basis(x: PhasePoint, c: CouplingParams, basis: Optional[BasisSet] = None) -> np.ndarray:
    """L(q, p) expanded in the adapted basis."""
    basis = basis or build_basis(x.n)
    q, p = x.q, x.p
    L = -1j * c.kappa * build_C(x.n)
    for k in range(x.n):
        cc = k + 1
        L = L + SQRT2 * p[k] * basis.D("-", cc)
        f = (c.nu + c.kappa * math.cosh(2 * q[k])) / math.sinh(2 * q[k])
        L = L - SQRT2 * f * basis.X(RootLabel.double(cc), "-", "i")
    for alpha in basis.roots:
        if alpha.kind == "double":
            continue
        L = L - 2 * c.mu / math.sinh(root_value(alpha, q)) * basis.X(alpha, "-", "i")
    return L


# --- r-matrix ---------------------------------------------------------------

def r_coefficients(q, basis: Optional[BasisSet] = None, *, constant: bool = True) -> np.ndarray:
    """Real coefficients r^{AB} with r_12(q) = sum r^{AB} T_A (x) T_B.

    With ``constant=False`` only the two q-dependent sums are kept.
    """
    q = check_chamber(q)
    basis = basis or build_basis(q.shape[0])
    if basis.n != q.shape[0]:
        raise ValueError("basis and q disagree on n")
    idx = basis.index
    K = len(basis)
    r = np.zeros((K, K))
    for alpha in basis.roots:
        a_q = root_value(alpha, q)
        parts = ("i",) if alpha.kind == "double" else ("r", "i")
        for eps in parts:
            r[idx(("X", alpha, "+", eps)), idx(("X", alpha, "-", eps))] += 2.0 / math.tanh(a_q)
        col = idx(("X", alpha, "-", "i"))
        w = -2.0 / math.sinh(a_q)
        if alpha.kind == "double":
            r[idx(("D", "+", alpha.a)), col] += w
        else:
            r[idx(("D", "+", alpha.a)), col] += w / SQRT2
            r[idx(("D", "+", alpha.b)), col] += w / SQRT2
    if constant:
        r -= np.eye(K)
    return r


def tensor_from_coefficients(coeffs: np.ndarray, basis: BasisSet) -> np.ndarray:
    E = basis.elements
    N = E.shape[1]
    right = np.einsum("AB,Bkl->Akl", coeffs, E)
    return np.einsum("Aij,Akl->ikjl", E, right).reshape(N * N, N * N)


def r_matrix_basis(q, basis: Optional[BasisSet] = None) -> np.ndarray:
    q = check_chamber(q)
    basis = basis or build_basis(q.shape[0])
    return tensor_from_coefficients(r_coefficients(q, basis), basis)


def r_dynamical_part(q, basis: Optional[BasisSet] = None) -> np.ndarray:
    """Only the coth and 1/sinh sums of the r-matrix."""
    q = check_chamber(q)
    basis = basis or build_basis(q.shape[0])
    return tensor_from_coefficients(r_coefficients(q, basis, constant=False), basis)


def r_standard_parts(q) -> list[np.ndarray]:
    """The five sums of the r-matrix written with matrix units e_kl.

    The last entry is the q-independent sum.
    """
    q = check_chamber(q)
    n = q.shape[0]
    N = 2 * n
    M = N * N
    parts = [np.zeros((M, M)) for _ in range(5)]

    def put(T, i, j, k, l, w):
        # e_ij (x) e_kl
        T[i * N + k, j * N + l] += w

    for a in range(n):
        for b in range(n):
            na, nb = n + a, n + b
            if a != b:
                w = 1.0 / math.tanh(q[a] - q[b])
                for (i, j, s1) in ((a, b, 1.0), (na, nb, 1.0)):
                    for (k, l, s2) in ((b, a, 1.0), (nb, na, -1.0)):
                        put(parts[0], i, j, k, l, w * s1 * s2)
                w = 0.5 / math.sinh(q[a] - q[b])
                for i in (a, na, b, nb):
                    put(parts[2], i, i, a, b, w)
                    put(parts[2], i, i, na, nb, -w)
            w = 1.0 / math.tanh(q[a] + q[b])
            for (i, j) in ((a, nb), (na, b)):
                put(parts[1], i, j, nb, a, w)
                put(parts[1], i, j, b, na, -w)
            w = -0.5 / math.sinh(q[a] + q[b])
            for i in (a, na, b, nb):
                put(parts[3], i, i, a, nb, w)
                put(parts[3], i, i, na, b, -w)
            put(parts[4], a, b, nb, na, 1.0)
            put(parts[4], na, nb, b, a, 1.0)
            put(parts[4], a, nb, b, na, 1.0)
            put(parts[4], na, b, nb, a, 1.0)
    return parts


def r_matrix_standard(q) -> np.ndarray:
    return sum(r_standard_parts(q)).astype(complex)


# --- R-operator and B -------------------------------------------------------

def R_apply(q, Y: np.ndarray, basis: Optional[BasisSet] = None) -> np.ndarray:
    """R(q) Y from the explicit sum over roots."""
    q = check_chamber(q)
    Y = check_algebra(Y)
    basis = basis or build_basis(q.shape[0])
    out = -Y.conj().T
    for alpha in basis.roots:
        a_q = root_value(alpha, q)
        parts = ("i",) if alpha.kind == "double" else ("r", "i")
        for eps in parts:
            xm = basis.X(alpha, "-", eps)
            w = np.real(np.sum(xm * Y.T))
            if w == 0.0:
                continue
            out = out + (2.0 / math.tanh(a_q) * w) * basis.X(alpha, "+", eps)
            if eps == "i":
                out = out - (2.0 / math.sinh(a_q) * w) * basis.Z(alpha)
    return out


def R_apply_trace(q, Y: np.ndarray, r: Optional[np.ndarray] = None) -> np.ndarray:
    """R(q) Y = tr_2(r_12(q) (1 (x) Y))."""
    Y = check_algebra(Y)
    if r is None:
        r = r_matrix_basis(q)
    return partial_trace_2(r @ embed_2(Y))


def b_matrix_closed(q, c: CouplingParams) -> np.ndarray:
    """B(q) from its S / T block entries."""
    q = check_chamber(q)
    return kernels.b_closed(q, c.mu, c.nu, c.kappa)


def b_matrix_from_r(q, c: CouplingParams, p=None, basis: Optional[BasisSet] = None) -> np.ndarray:
    """B = (L + R L) / 2; ``p`` defaults to zero (B does not depend on it)."""
    q = check_chamber(q)
    p = np.zeros_like(q) if p is None else p
    L = lax_matrix(PhasePoint(q, p), c)
    return 0.5 * (L + R_apply(q, L, basis))


def b_matrix(q, c: CouplingParams, basis: Optional[BasisSet] = None, *,
             check: bool = True, atol: float = 1e-12) -> np.ndarray:
    """B(q) from the closed form, optionally cross-checked against (L + RL)/2."""
    B = b_matrix_closed(q, c)
    if check:
        other = b_matrix_from_r(q, c, basis=basis)
        err = float(np.max(np.abs(B - other)))
        if err > atol * max(1.0, float(np.max(np.abs(B)))):
            raise ConsistencyError(f"closed-form B and (L + RL)/2 differ by {err:.3e}")
    return B


def bl_commutator_closed(x: PhasePoint, c: CouplingParams, basis: Optional[BasisSet] = None) -> np.ndarray:
    """[B, L] written out in the X^{-,i} and D^- directions."""
    basis = basis or build_basis(x.n)
    q, p = x.q, x.p
    dH = grad_q_hamiltonian(q, c)
    out = np.zeros((2 * x.n, 2 * x.n), dtype=complex)
    for alpha in basis.roots:
        a, b = alpha.a - 1, alpha.b - 1
        if alpha.kind == "double":
            y = 2.0 * q[a]
            w = 2.0 * SQRT2 * p[a] * (c.nu * math.cosh(y) + c.kappa) / math.sinh(y) ** 2
        else:
            y = root_value(alpha, q)
            pv = p[a] - p[b] if alpha.kind == "diff" else p[a] + p[b]
            w = 2.0 * c.mu * pv * math.cosh(y) / math.sinh(y) ** 2
        out += w * basis.X(alpha, "-", "i")
    for k in range(x.n):
        out -= SQRT2 * dH[k] * basis.D("-", k + 1)
    return out


def hyperbolic_identity(x: float, y: float) -> tuple[float, float]:
    """Both sides of the sinh/cosh identity used to simplify [B, L]."""
    if x == 0 or y == 0 or x + y == 0:
        raise ValueError("x, y and x + y must be non-zero")
    sx, sy = math.sinh(x), math.sinh(y)
    lhs = math.cosh(x) / sx ** 2 / sy - math.cosh(y) / sy ** 2 / sx
    rhs = (1.0 / sx ** 2 - 1.0 / sy ** 2) / math.sinh(x + y)
    return lhs, rhs
