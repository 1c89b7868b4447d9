"""Canonical Poisson brackets on T*(chamber) and the r-matrix bracket test.

The convention is {q_c, p_d} = delta_cd, i.e.
{f, g} = sum_c df/dq_c dg/dp_c - df/dp_c dg/dq_c.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import mpmath as mp
import numpy as np

from . import kernels
from .liealg import embed_1, embed_2, swap
from .model import CouplingParams, PhasePoint, check_chamber, lax_matrix

FD_STEP = 1e-6


@dataclass(frozen=True)
class Observable:
    """A (possibly complex) phase-space function with an optional analytic gradient.

    ``gradient(x)`` must return ``(df/dq, df/dp)``.
    """

    evaluate: Callable[[PhasePoint], complex]
    gradient: Optional[Callable[[PhasePoint], tuple]] = None

    def __call__(self, x: PhasePoint):
        return self.evaluate(x)

    def fd_gradient(self, x: PhasePoint, h: float = FD_STEP):
        return fd_gradient(self.evaluate, x, h)


def fd_gradient(f, x: PhasePoint, h: float = FD_STEP):
    """Central differences in every q and p direction."""
    n = x.n
    gq = np.zeros(n, dtype=complex)
    gp = np.zeros(n, dtype=complex)
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        gq[c] = (f(PhasePoint(x.q + e, x.p)) - f(PhasePoint(x.q - e, x.p))) / (2 * h)
        gp[c] = (f(PhasePoint(x.q, x.p + e)) - f(PhasePoint(x.q, x.p - e))) / (2 * h)
    return gq, gp


def coordinate(kind: str, c: int) -> Observable:
    """q_c or p_c as an observable (c is zero-based)."""
    if kind not in ("q", "p"):
        raise ValueError(kind)

    def value(x):
        return (x.q if kind == "q" else x.p)[c]

    def grad(x):
        e = np.zeros(x.n)
        e[c] = 1.0
        z = np.zeros(x.n)
        return (e, z) if kind == "q" else (z, e)

    return Observable(value, grad)


def canonical_bracket(f: Observable, g: Observable, x: PhasePoint, *, allow_fd: bool = True) -> complex:
    grads = []
    for obs in (f, g):
        if obs.gradient is not None:
            grads.append(obs.gradient(x))
        elif allow_fd:
            grads.append(obs.fd_gradient(x))
        else:
            raise ValueError("observable has no analytic gradient and finite differences are disabled")
    (fq, fp), (gq, gp) = grads
    val = np.sum(np.asarray(fq) * np.asarray(gp)) - np.sum(np.asarray(fp) * np.asarray(gq))
    return complex(val)


# --- Lax partials and the tensor bracket -----------------------------------

def lax_partials(x: PhasePoint, c: CouplingParams) -> tuple[np.ndarray, np.ndarray]:
    """(dL/dq_c, dL/dp_c) stacked along the first axis."""
    n = x.n
    dq = kernels.lax_partials_q(x.q, c.mu, c.nu, c.kappa)
    dp = np.zeros((n, 2 * n, 2 * n), dtype=complex)
    for k in range(n):
        dp[k, k, k] = 1.0
        dp[k, n + k, n + k] = -1.0
    return dq, dp


def lax_partials_fd(x: PhasePoint, c: CouplingParams, h: float = FD_STEP) -> tuple[np.ndarray, np.ndarray]:
    n = x.n
    dq = np.empty((n, 2 * n, 2 * n), dtype=complex)
    dp = np.empty_like(dq)
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        dq[k] = (lax_matrix(PhasePoint(x.q + e, x.p), c) - lax_matrix(PhasePoint(x.q - e, x.p), c)) / (2 * h)
        dp[k] = (lax_matrix(PhasePoint(x.q, x.p + e), c) - lax_matrix(PhasePoint(x.q, x.p - e), c)) / (2 * h)
    return dq, dp


def _bracket_from_partials(dq, dp):
    n, N, _ = dq.shape
    # {L_ij, L_kl} lands at (i*N + k, j*N + l), i.e. kron ordering
    t = np.einsum("cij,ckl->ikjl", dq, dp) - np.einsum("cij,ckl->ikjl", dp, dq)
    return t.reshape(N * N, N * N)


def lax_tensor_bracket(x: PhasePoint, c: CouplingParams, method: str = "analytic") -> np.ndarray:
    """{L_1, L_2} as an N^2 x N^2 array."""
    if method == "analytic":
        dq, dp = lax_partials(x, c)
    elif method in ("fd", "finite-difference"):
        dq, dp = lax_partials_fd(x, c)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _bracket_from_partials(dq, dp)


@dataclass(frozen=True)
class BracketReport:
    n: int
    seed: Optional[int]
    point: PhasePoint
    residual_max: float
    residual_fro: float
    method: str


def rmatrix_rhs(r: np.ndarray, L: np.ndarray) -> np.ndarray:
    """[r_12, L_1] - [r_21, L_2]."""
    L1 = embed_1(L)
    L2 = embed_2(L)
    r21 = swap(r)
    return (r @ L1 - L1 @ r) - (r21 @ L2 - L2 @ r21)


def rmatrix_identity_residual(x: PhasePoint, c: CouplingParams, r: np.ndarray, *,
                              method: str = "analytic", seed: Optional[int] = None) -> BracketReport:
    lhs = lax_tensor_bracket(x, c, method)
    res = lhs - rmatrix_rhs(r, lax_matrix(x, c))
    method = "analytic" if method == "analytic" else "finite-difference"
    return BracketReport(x.n, seed, x, float(np.max(np.abs(res))), float(np.linalg.norm(res)), method)


# --- spectral invariants ----------------------------------------------------
#
# {tr L^j, tr L^k} is a difference of terms of size ~ jk |L|^(j+k-2) |dL|, so
# in double precision the cancellation floor easily exceeds 1e-9.  The
# "extended" path redoes the same bracket in mpmath arithmetic.

EXTENDED_DPS = 40


def _lax_and_partials_mp(x: PhasePoint, c: CouplingParams):
    """L and dL/dq_c, dL/dp_c as object arrays of mpmath numbers."""
    n = x.n
    N = 2 * n
    with mp.workdps(EXTENDED_DPS):
        q = [mp.mpf(float(v)) for v in x.q]
        p = [mp.mpf(float(v)) for v in x.p]
        mu, nu, kappa = mp.mpf(c.mu), mp.mpf(c.nu), mp.mpf(c.kappa)
        zero = mp.mpc(0)
        L = np.full((N, N), zero, dtype=object)
        dq = np.full((n, N, N), zero, dtype=object)
        dp = np.full((n, N, N), zero, dtype=object)
        for a in range(n):
            for b in range(n):
                if a == b:
                    y = 2 * q[a]
                    A = mp.mpc(p[a])
                    B = mp.mpc(0, 1) * (nu + kappa * mp.cosh(y)) / mp.sinh(y)
                    dB = mp.mpc(0, -2) * (nu * mp.cosh(y) + kappa) / mp.sinh(y) ** 2
                    dq[a, a, n + a] += dB
                    dq[a, n + a, a] -= dB
                else:
                    u, v = q[a] - q[b], q[a] + q[b]
                    A = mp.mpc(0, -1) * mu / mp.sinh(u)
                    B = mp.mpc(0, 1) * mu / mp.sinh(v)
                    dA = mp.mpc(0, 1) * mu * mp.cosh(u) / mp.sinh(u) ** 2
                    dBs = mp.mpc(0, -1) * mu * mp.cosh(v) / mp.sinh(v) ** 2
                    # A_ab depends on q_a - q_b, B_ab on q_a + q_b
                    for cc, sA in ((a, 1), (b, -1)):
                        dq[cc, a, b] += sA * dA
                        dq[cc, n + a, n + b] -= sA * dA
                        dq[cc, a, n + b] += dBs
                        dq[cc, n + a, b] -= dBs
                L[a, b] = A
                L[a, n + b] = B
                L[n + a, b] = -B
                L[n + a, n + b] = -A
            L[a, n + a] -= mp.mpc(0, 1) * kappa
            L[n + a, a] -= mp.mpc(0, 1) * kappa
            dp[a, a, a] = mp.mpc(1)
            dp[a, n + a, n + a] = mp.mpc(-1)
    return L, dq, dp


def trace_power_gradients(x: PhasePoint, c: CouplingParams, kmax: int,
                          precision: str = "extended") -> list[tuple[np.ndarray, np.ndarray]]:
    """Analytic (d/dq, d/dp) of tr L^k for k = 1..kmax, from one set of powers."""
    if precision == "double":
        L = lax_matrix(x, c)
        dq, dp = lax_partials(x, c)
        Lk = np.eye(L.shape[0], dtype=complex)
        out = []
        for k in range(1, kmax + 1):
            out.append((k * np.einsum("ij,cji->c", Lk, dq), k * np.einsum("ij,cji->c", Lk, dp)))
            Lk = Lk @ L
        return out
    if precision != "extended":
        raise ValueError(f"unknown precision {precision!r}")
    with mp.workdps(EXTENDED_DPS):
        L, dq, dp = _lax_and_partials_mp(x, c)
        Lk = np.identity(L.shape[0], dtype=object) * mp.mpc(1)
        out = []
        for k in range(1, kmax + 1):
            gq = np.array([k * np.trace(Lk.dot(d)) for d in dq], dtype=object)
            gp = np.array([k * np.trace(Lk.dot(d)) for d in dp], dtype=object)
            out.append((gq, gp))
            Lk = Lk.dot(L)
    return out


def trace_power(k: int, c: CouplingParams, precision: str = "double") -> Observable:
    """tr L^k as an observable with its analytic gradient."""

    def value(x):
        return complex(np.trace(np.linalg.matrix_power(lax_matrix(x, c), k)))

    def grad(x):
        return trace_power_gradients(x, c, k, precision)[-1]

    return Observable(value, grad)


def involution_residual(x: PhasePoint, c: CouplingParams, j: int, k: int, *,
                        precision: str = "extended") -> float:
    """|{tr L^j, tr L^k}| at x."""
    return float(involution_matrix(x, c, max(j, k), precision=precision, _check=(j, k))[j - 1, k - 1])


def involution_matrix(x: PhasePoint, c: CouplingParams, kmax: Optional[int] = None, *,
                      precision: str = "extended", _check=None) -> np.ndarray:
    """|{tr L^j, tr L^k}| for all 1 <= j, k <= kmax (default 2n)."""
    N = 2 * x.n
    kmax = N if kmax is None else kmax
    for v in (_check or (kmax,)):
        if not 1 <= v <= N:
            raise ValueError(f"powers must lie in 1..{N}, got {v}")
    grads = trace_power_gradients(x, c, kmax, precision)
    obs = [Observable(lambda _x: 0.0, (lambda _x, g=g: g)) for g in grads]
    out = np.zeros((kmax, kmax))
    with mp.workdps(EXTENDED_DPS):
        for j in range(kmax):
            for k in range(j + 1, kmax):
                out[j, k] = out[k, j] = abs(canonical_bracket(obs[j], obs[k], x, allow_fd=False))
    return out


def involution_scale(x: PhasePoint, c: CouplingParams, j: int, k: int) -> float:
    """Size of the individual terms that cancel in {tr L^j, tr L^k}.

    A double-precision evaluation of the bracket can only be trusted down to
    about machine epsilon times this number.
    """
    L = np.linalg.norm(lax_matrix(x, c), 2)
    dq, dp = lax_partials(x, c)
    nq = max(np.linalg.norm(d, 2) for d in dq)
    npp = max(np.linalg.norm(d, 2) for d in dp)
    N = 2 * x.n
    return float(2 * x.n * j * k * N * N * L ** (j + k - 2) * nq * npp)
