"""Vectorized numpy reference kernels.

All functions take the raw couplings, never the dataclasses, so that the
numba twins in ``_numba.py`` can share the exact same signatures.
"""
import numpy as np


def _pair_grids(q):
    """Differences and sums q_a -/+ q_b plus an off-diagonal mask."""
    diff = q[:, None] - q[None, :]
    summ = q[:, None] + q[None, :]
    off = ~np.eye(q.shape[0], dtype=bool)
    # diagonal of diff is 0; park a harmless value there
    diff = np.where(off, diff, 1.0)
    return diff, summ, off


def lax_matrix(q, p, mu, nu, kappa):
    n = q.shape[0]
    diff, summ, off = _pair_grids(q)
    A = np.where(off, -1j * mu / np.sinh(diff), 0.0) + np.diag(p).astype(complex)
    B = np.where(off, 1j * mu / np.sinh(summ), 0.0)
    two_q = 2.0 * q
    B[np.diag_indices(n)] = 1j * (nu + kappa * np.cosh(two_q)) / np.sinh(two_q)
    L = np.empty((2 * n, 2 * n), dtype=complex)
    L[:n, :n] = A
    L[:n, n:] = B
    L[n:, :n] = -B
    L[n:, n:] = -A
    # -kappa i C
    idx = np.arange(n)
    L[idx, n + idx] -= 1j * kappa
    L[n + idx, idx] -= 1j * kappa
    return L


def hamiltonian(q, p, g2, g1sq, g2sq):
    diff, summ, off = _pair_grids(q)
    pair = np.where(off, 1.0 / np.sinh(diff) ** 2 + 1.0 / np.sinh(summ) ** 2, 0.0)
    ext = g1sq / np.sinh(q) ** 2 + g2sq / np.sinh(2.0 * q) ** 2
    return 0.5 * np.dot(p, p) + np.sum(ext) + 0.5 * g2 * np.sum(pair)


def grad_q_hamiltonian(q, g2, g1sq, g2sq):
    """dH/dq_c, using d/dx sinh(x)^-2 = -2 cosh(x) / sinh(x)^3."""
    diff, summ, off = _pair_grids(q)
    pair = np.where(off, np.cosh(diff) / np.sinh(diff) ** 3 + np.cosh(summ) / np.sinh(summ) ** 3, 0.0)
    ext = (-2.0 * g1sq * np.cosh(q) / np.sinh(q) ** 3
           - 4.0 * g2sq * np.cosh(2.0 * q) / np.sinh(2.0 * q) ** 3)
    return ext - 2.0 * g2 * np.sum(pair, axis=1)


def lax_partials_q(q, mu, nu, kappa):
    """Stack of dL/dq_c, shape (n, 2n, 2n)."""
    n = q.shape[0]
    diff, summ, off = _pair_grids(q)
    # d/dq_a of -i mu / sinh(q_a - q_b) and of i mu / sinh(q_a + q_b)
    kd = np.where(off, 1j * mu * np.cosh(diff) / np.sinh(diff) ** 2, 0.0)
    ks = np.where(off, -1j * mu * np.cosh(summ) / np.sinh(summ) ** 2, 0.0)
    two_q = 2.0 * q
    fprime = -2j * (nu * np.cosh(two_q) + kappa) / np.sinh(two_q) ** 2
    out = np.zeros((n, 2 * n, 2 * n), dtype=complex)
    for c in range(n):
        A = np.zeros((n, n), dtype=complex)
        B = np.zeros((n, n), dtype=complex)
        A[c, :] = kd[c, :]
        A[:, c] = -kd[:, c]
        B[c, :] += ks[c, :]
        B[:, c] += ks[:, c]
        B[c, c] = fprime[c]
        out[c, :n, :n] = A
        out[c, :n, n:] = B
        out[c, n:, :n] = -B
        out[c, n:, n:] = -A
    return out


def b_closed(q, mu, nu, kappa):
    n = q.shape[0]
    diff, summ, off = _pair_grids(q)
    two_q = 2.0 * q
    sh2 = np.sinh(two_q) ** 2
    S = np.where(off, -1j * mu * np.cosh(diff) / np.sinh(diff) ** 2, 0.0)
    T = np.where(off, 1j * mu * np.cosh(summ) / np.sinh(summ) ** 2, 0.0)
    pair = np.where(off, 1.0 / np.sinh(diff) ** 2 + 1.0 / np.sinh(summ) ** 2, 0.0)
    S[np.diag_indices(n)] = 1j * (nu + kappa * np.cosh(two_q)) / sh2 + 1j * mu * np.sum(pair, axis=1)
    T[np.diag_indices(n)] = 1j * (nu * np.cosh(two_q) + kappa) / sh2
    return np.block([[S, T], [T, S]])


def chamber_gap(q):
    """min(q_n, q_c - q_{c+1}); negative outside the chamber."""
    if q.shape[0] == 1:
        return q[0]
    return min(q[-1], np.min(q[:-1] - q[1:]))


def rk4(q0, p0, g2, g1sq, g2sq, dt, nsteps, stride, margin):
    """Classical RK4 for dq = p, dp = -dH/dq.

    Returns ``(qs, ps, status, steps_done)``; samples are every ``stride``
    steps starting with the initial point.  status is 1 when the chamber gap
    dropped below ``margin`` (the offending state is not stored).
    """
    nsamples = nsteps // stride + 1
    qs = np.empty((nsamples, q0.shape[0]))
    ps = np.empty_like(qs)
    q = q0.copy()
    p = p0.copy()
    qs[0] = q
    ps[0] = p
    k = 1
    for step in range(1, nsteps + 1):
        f1 = -grad_q_hamiltonian(q, g2, g1sq, g2sq)
        q2 = q + 0.5 * dt * p
        p2 = p + 0.5 * dt * f1
        f2 = -grad_q_hamiltonian(q2, g2, g1sq, g2sq)
        q3 = q + 0.5 * dt * p2
        p3 = p + 0.5 * dt * f2
        f3 = -grad_q_hamiltonian(q3, g2, g1sq, g2sq)
        q4 = q + dt * p3
        p4 = p + dt * f3
        f4 = -grad_q_hamiltonian(q4, g2, g1sq, g2sq)
        q_new = q + dt / 6.0 * (p + 2.0 * p2 + 2.0 * p3 + p4)
        p_new = p + dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        if not chamber_gap(q_new) >= margin:
            return qs[:k], ps[:k], 1, step - 1
        q, p = q_new, p_new
        if step % stride == 0:
            qs[k] = q
            ps[k] = p
            k += 1
    return qs[:k], ps[:k], 0, nsteps
