"""Loop-form numba twins of the kernels in ``_numpy.py``."""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def lax_matrix(q, p, mu, nu, kappa):
    n = q.shape[0]
    L = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            if a == b:
                Aab = complex(p[a], 0.0)
                Bab = 1j * (nu + kappa * math.cosh(2.0 * q[a])) / math.sinh(2.0 * q[a])
            else:
                Aab = -1j * mu / math.sinh(q[a] - q[b])
                Bab = 1j * mu / math.sinh(q[a] + q[b])
            L[a, b] = Aab
            L[a, n + b] = Bab
            L[n + a, b] = -Bab
            L[n + a, n + b] = -Aab
        L[a, n + a] -= 1j * kappa
        L[n + a, a] -= 1j * kappa
    return L


@njit(cache=True)
def hamiltonian(q, p, g2, g1sq, g2sq):
    n = q.shape[0]
    h = 0.0
    for c in range(n):
        h += 0.5 * p[c] * p[c]
        h += g1sq / math.sinh(q[c]) ** 2 + g2sq / math.sinh(2.0 * q[c]) ** 2
        for d in range(c + 1, n):
            h += g2 / math.sinh(q[c] - q[d]) ** 2 + g2 / math.sinh(q[c] + q[d]) ** 2
    return h


@njit(cache=True)
def grad_q_hamiltonian(q, g2, g1sq, g2sq):
    n = q.shape[0]
    out = np.empty(n)
    for c in range(n):
        x = q[c]
        s = -2.0 * g1sq * math.cosh(x) / math.sinh(x) ** 3
        s -= 4.0 * g2sq * math.cosh(2.0 * x) / math.sinh(2.0 * x) ** 3
        for d in range(n):
            if d != c:
                u = x - q[d]
                v = x + q[d]
                s -= 2.0 * g2 * (math.cosh(u) / math.sinh(u) ** 3 + math.cosh(v) / math.sinh(v) ** 3)
        out[c] = s
    return out


@njit(cache=True)
def lax_partials_q(q, mu, nu, kappa):
    n = q.shape[0]
    out = np.zeros((n, 2 * n, 2 * n), dtype=np.complex128)
    for c in range(n):
        for b in range(n):
            if b == c:
                continue
            u = q[c] - q[b]
            v = q[c] + q[b]
            kd = 1j * mu * math.cosh(u) / math.sinh(u) ** 2
            ks = -1j * mu * math.cosh(v) / math.sinh(v) ** 2
            # row c and column c of the A block
            out[c, c, b] = kd
            out[c, n + c, n + b] = -kd
            out[c, b, c] = -kd  # d/dq_c of -i mu / sinh(q_b - q_c)
            out[c, n + b, n + c] = kd
            # B block is symmetric in (a, b)
            out[c, c, n + b] = ks
            out[c, b, n + c] = ks
            out[c, n + c, b] = -ks
            out[c, n + b, c] = -ks
        x = 2.0 * q[c]
        fp = -2j * (nu * math.cosh(x) + kappa) / math.sinh(x) ** 2
        out[c, c, n + c] = fp
        out[c, n + c, c] = -fp
    return out


@njit(cache=True)
def b_closed(q, mu, nu, kappa):
    n = q.shape[0]
    B = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for a in range(n):
        x = 2.0 * q[a]
        sh2 = math.sinh(x) ** 2
        Saa = 1j * (nu + kappa * math.cosh(x)) / sh2
        Taa = 1j * (nu * math.cosh(x) + kappa) / sh2
        for b in range(n):
            if b == a:
                continue
            u = q[a] - q[b]
            v = q[a] + q[b]
            Sab = -1j * mu * math.cosh(u) / math.sinh(u) ** 2
            Tab = 1j * mu * math.cosh(v) / math.sinh(v) ** 2
            B[a, b] = Sab
            B[n + a, n + b] = Sab
            B[a, n + b] = Tab
            B[n + a, b] = Tab
            Saa += 1j * mu * (1.0 / math.sinh(u) ** 2 + 1.0 / math.sinh(v) ** 2)
        B[a, a] = Saa
        B[n + a, n + a] = Saa
        B[a, n + a] = Taa
        B[n + a, a] = Taa
    return B


@njit(cache=True)
def chamber_gap(q):
    n = q.shape[0]
    g = q[n - 1]
    for c in range(n - 1):
        d = q[c] - q[c + 1]
        if d < g:
            g = d
    return g


@njit(cache=True)
def rk4(q0, p0, g2, g1sq, g2sq, dt, nsteps, stride, margin):
    n = q0.shape[0]
    nsamples = nsteps // stride + 1
    qs = np.empty((nsamples, n))
    ps = np.empty((nsamples, n))
    q = q0.copy()
    p = p0.copy()
    qs[0] = q
    ps[0] = p
    k = 1
    tmp = np.empty(n)
    for step in range(1, nsteps + 1):
        f1 = -grad_q_hamiltonian(q, g2, g1sq, g2sq)
        p2 = p + 0.5 * dt * f1
        for i in range(n):
            tmp[i] = q[i] + 0.5 * dt * p[i]
        f2 = -grad_q_hamiltonian(tmp, g2, g1sq, g2sq)
        p3 = p + 0.5 * dt * f2
        for i in range(n):
            tmp[i] = q[i] + 0.5 * dt * p2[i]
        f3 = -grad_q_hamiltonian(tmp, g2, g1sq, g2sq)
        p4 = p + dt * f3
        for i in range(n):
            tmp[i] = q[i] + dt * p3[i]
        f4 = -grad_q_hamiltonian(tmp, g2, g1sq, g2sq)
        q_new = q + dt / 6.0 * (p + 2.0 * p2 + 2.0 * p3 + p4)
        p_new = p + dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        if not chamber_gap(q_new) >= margin:
            return qs[:k], ps[:k], 1, step - 1
        q = q_new
        p = p_new
        if step % stride == 0:
            qs[k] = q
            ps[k] = p
            k += 1
    return qs[:k], ps[:k], 0, nsteps
