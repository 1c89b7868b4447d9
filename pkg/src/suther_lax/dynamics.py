"""Time evolution of the Sutherland model.

Two independent solvers are provided: direct integration of Hamilton's
equations, and the projection method, which runs the free geodesic
y(t) = exp(Q_0) exp(t L_0) on U(n, n) and reads positions off its KAK
decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from . import kernels
from .liealg import build_C
from .model import (
    MIN_GAP,
    ChamberError,
    CouplingParams,
    PhasePoint,
    b_matrix_closed,
    chamber_gap,
    grad_q_hamiltonian,
    hamiltonian,
    lax_matrix,
)
from .parallel import parallel_map


class WallApproachError(RuntimeError):
    """The trajectory came within the safety margin of a chamber wall."""

    def __init__(self, msg, trajectory=None, t=None):
        super().__init__(msg)
        self.trajectory = trajectory
        self.t = t


class EigenvalueCollisionError(RuntimeError):
    """A group element is not regular: two of its radial coordinates coincide."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


# --- Hamilton's equations ---------------------------------------------------

def hamilton_rhs(x: PhasePoint, c: CouplingParams) -> tuple[np.ndarray, np.ndarray]:
    return x.p.copy(), -grad_q_hamiltonian(x.q, c)


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"
    dt: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    t_end: float = 2.0
    stride: int = 1
    wall_margin: float = MIN_GAP

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"method must be 'rk4' or 'rk45', got {self.method!r}")
        for name in ("dt", "rtol", "atol", "t_end", "wall_margin"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f"stride must be a positive integer, got {self.stride!r}")

    @property
    def nsteps(self) -> int:
        return int(round(self.t_end / self.dt))

    def sample_times(self) -> np.ndarray:
        k = np.arange(0, self.nsteps + 1, self.stride)
        return k * self.dt


@dataclass
class Trajectory:
    """Sampled states; ``q`` and ``p`` have shape (len(times), n)."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energy: Optional[np.ndarray] = None
    spectra: Optional[np.ndarray] = None
    lax_residual: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.q = np.atleast_2d(np.asarray(self.q, dtype=float))
        self.p = np.atleast_2d(np.asarray(self.p, dtype=float))
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def n(self) -> int:
        return self.q.shape[1]

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.q[i], self.p[i])

    @property
    def states(self) -> list[PhasePoint]:
        return [self.point(i) for i in range(len(self))]

    def with_diagnostics(self, c: CouplingParams) -> "Trajectory":
        self.energy = np.array([hamiltonian(x, c) for x in self.states])
        self.spectra = np.array([np.linalg.eigvals(lax_matrix(x, c)) for x in self.states])
        return self


def _rk4(x0, c, cfg):
    qs, ps, status, steps = kernels.rk4(
        np.ascontiguousarray(x0.q), np.ascontiguousarray(x0.p),
        c.g2, c.g1sq, c.g2sq, cfg.dt, cfg.nsteps, int(cfg.stride), cfg.wall_margin)
    times = np.arange(len(qs)) * cfg.stride * cfg.dt
    return times, qs, ps, status == 1, steps * cfg.dt


def _rk45(x0, c, cfg, times):
    n = x0.n
    g2, g1sq, g2sq = c.g2, c.g1sq, c.g2sq

    def rhs(_t, z):
        return np.concatenate([z[n:], -kernels.grad_q_hamiltonian(np.ascontiguousarray(z[:n]), g2, g1sq, g2sq)])

    def wall(_t, z):
        return chamber_gap(z[:n]) - cfg.wall_margin

    wall.terminal = True
    wall.direction = -1
    sol = solve_ivp(rhs, (times[0], times[-1]), np.concatenate([x0.q, x0.p]), method="RK45",
                    t_eval=times, rtol=cfg.rtol, atol=cfg.atol, events=wall)
    hit = sol.status == 1
    if sol.status == -1:
        raise RuntimeError(f"rk45 step failure: {sol.message}")
    t_hit = float(sol.t_events[0][0]) if hit else None
    return sol.t, sol.y[:n].T, sol.y[n:].T, hit, t_hit


def integrate(x0: PhasePoint, c: CouplingParams, cfg: IntegratorConfig = IntegratorConfig(),
              times: Optional[Sequence[float]] = None, *, diagnostics: bool = True) -> Trajectory:
    """Integrate Hamilton's equations from x0.

    rk4 samples every ``stride`` steps of size ``dt``; rk45 reports at
    ``times`` (default: the same grid).  Raises :class:`WallApproachError`
    carrying the partial trajectory if the chamber gap falls below
    ``cfg.wall_margin``.
    """
    if cfg.method == "rk4":
        if times is not None:
            raise ValueError("rk4 samples on its own step grid; pass dt/stride instead of times")
        t, qs, ps, hit, t_hit = _rk4(x0, c, cfg)
    else:
        times = cfg.sample_times() if times is None else np.asarray(times, dtype=float)
        t, qs, ps, hit, t_hit = _rk45(x0, c, cfg, times)
    traj = Trajectory(t, qs, ps, meta={"method": cfg.method})
    if diagnostics:
        traj.with_diagnostics(c)
    if hit:
        raise WallApproachError(f"trajectory reached the chamber wall margin near t={t_hit:.6g}", traj, t_hit)
    return traj


# --- Lax-equation diagnostics ----------------------------------------------

def lax_residual_series(traj: Trajectory, c: CouplingParams) -> np.ndarray:
    """Per-sample max-abs of (L(t+h) - L(t-h))/2h - [B, L]; NaN at the ends."""
    if len(traj) < 3:
        raise ValueError("need at least 3 samples for a centred time derivative")
    dts = np.diff(traj.times)
    h = dts[0]
    if not np.allclose(dts, h, rtol=1e-9, atol=0.0):
        raise ValueError("lax residual needs uniformly spaced samples")
    Ls = [lax_matrix(x, c) for x in traj.states]
    out = np.full(len(traj), np.nan)
    for i in range(1, len(traj) - 1):
        B = b_matrix_closed(traj.q[i], c)
        dL = (Ls[i + 1] - Ls[i - 1]) / (2 * h)
        out[i] = np.max(np.abs(dL - (B @ Ls[i] - Ls[i] @ B)))
    return out


def lax_residual(traj: Trajectory, c: CouplingParams) -> float:
    return float(np.nanmax(lax_residual_series(traj, c)))


def _matched_distance(ref: np.ndarray, ev: np.ndarray) -> float:
    cost = np.abs(ref[:, None] - ev[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def spectral_drift_series(traj: Trajectory, c: CouplingParams) -> np.ndarray:
    """Distance of the spectrum of L(t) from that of L(0), per sample.

    The eigenvalues are complex when kappa != 0, so "sorting" is done by an
    optimal matching between the two spectra.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    spectra = traj.spectra
    if spectra is None:
        spectra = np.array([np.linalg.eigvals(lax_matrix(x, c)) for x in traj.states])
    ref = spectra[0]
    return np.array([_matched_distance(ref, ev) for ev in spectra])


def spectral_drift(traj: Trajectory, c: CouplingParams) -> float:
    return float(np.max(spectral_drift_series(traj, c)))


def energy_drift(traj: Trajectory, c: CouplingParams) -> float:
    e = traj.energy if traj.energy is not None else np.array([hamiltonian(x, c) for x in traj.states])
    return float(np.max(np.abs(e - e[0])))


# --- KAK decomposition and the projection method ---------------------------

RECONSTRUCT_TOL = 1e-10

@dataclass(frozen=True)
class KakFactors:
    """y = kL exp(Q) kR^{-1} with kL, kR in K = U(n) x U(n)."""

    q: np.ndarray
    kL: np.ndarray
    kR: np.ndarray

    def reconstruct(self) -> np.ndarray:
        ex = np.exp(np.concatenate([self.q, -self.q]))
        return (self.kL * ex) @ self.kR.conj().T


def group_defect(y: np.ndarray) -> float:
    """Relative size of y* C y - C."""
    C = build_C(y.shape[0] // 2)
    return float(np.max(np.abs(y.conj().T @ C @ y - C)) / max(1.0, np.linalg.norm(y, 2) ** 2))


def kak_decompose(y: np.ndarray, *, collision_tol: float = 1e-10, group_tol: float = 1e-9) -> KakFactors:
    """KAK factors of a regular element of U(n, n).

    Radial coordinates are half the logs of the n eigenvalues of y y* above 1,
    obtained as squared singular values of y.  Each eigenvector v_c is paired
    with C v_c (eigenvalue 1/lambda_c), which makes kL commute with C.  The M
    gauge is fixed by making the first non-negligible entry of v_c real and
    non-negative.
    """
    y = np.asarray(y, dtype=complex)
    N = y.shape[0]
    if y.ndim != 2 or y.shape[1] != N or N % 2:
        raise ValueError(f"expected a square matrix of even size, got {y.shape}")
    if group_defect(y) > group_tol:
        raise ValueError("y does not satisfy y* C y = C")
    n = N // 2
    u, s, _ = np.linalg.svd(y)
    lam = s[:n] ** 2
    # relative gap to the next eigenvalue down; the last one pairs with 1
    below = np.append(lam[1:], 1.0)
    if np.any(lam - below <= collision_tol * lam):
        raise EigenvalueCollisionError(f"y is not regular: eigenvalues of y y* {lam.tolist()} collide")
    V = u[:, :n].copy()
    for k in range(n):
        col = V[:, k]
        j = int(np.argmax(np.abs(col) > 1e-12 * np.max(np.abs(col))))
        V[:, k] = col * (abs(col[j]) / col[j])
    C = build_C(n)
    kL = np.concatenate([V, C @ V], axis=1)
    q = 0.5 * np.log(lam)
    kR = (y.conj().T @ kL) * np.exp(-np.concatenate([q, -q]))
    f = KakFactors(q, kL, kR)
    err = np.max(np.abs(f.reconstruct() - y)) / max(1.0, np.max(np.abs(y)))
    if not err <= RECONSTRUCT_TOL:
        raise EigenvalueCollisionError(f"KAK reconstruction error {err:.3e} exceeds {RECONSTRUCT_TOL:g}")
    return f


def cartan_exp(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.diag(np.exp(np.concatenate([q, -q]))).astype(complex)


def projection_point(x0: PhasePoint, c: CouplingParams, t: float, *, L0=None) -> PhasePoint:
    """The state at time t from the geodesic y(t) = exp(Q_0) exp(t L_0).

    Negative t is allowed here (the geodesic is complete); the short-time
    oracle uses it for symmetric differences.
    """
    L0 = lax_matrix(x0, c) if L0 is None else L0
    if t == 0:
        return x0
    y = cartan_exp(x0.q) @ expm(t * L0)
    try:
        f = kak_decompose(y)
    except EigenvalueCollisionError as err:
        raise EigenvalueCollisionError(f"{err} at t={t:g}", t=t) from None
    Lt = f.kR.conj().T @ L0 @ f.kR
    p = np.real(np.diag(Lt)[: x0.n])
    try:
        return PhasePoint(f.q, p)
    except ChamberError as err:
        raise ChamberError(f"projection left the chamber at t={t:g}: {err}") from None


def projection_solve(x0: PhasePoint, c: CouplingParams, times: Sequence[float], *,
                     diagnostics: bool = False) -> Trajectory:
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("projection times must be non-negative")
    L0 = lax_matrix(x0, c)
    pts = parallel_map(lambda t: projection_point(x0, c, float(t), L0=L0), times)
    traj = Trajectory(times, [x.q for x in pts], [x.p for x in pts], meta={"method": "projection"})
    if diagnostics:
        traj.with_diagnostics(c)
    return traj


def short_time_velocity(x0: PhasePoint, c: CouplingParams, hs=(1e-3, 1e-4), *,
                        scheme: str = "central") -> np.ndarray:
    """Richardson-extrapolated dq/dt at t = 0 along the projection flow.

    ``forward`` extrapolates (q(h) - q(0))/h, which leaves an error of
    |d3q/dt3| h1 h2 / 6; with forces of order 100 that is above 1e-6.
    ``central`` extrapolates (q(h) - q(-h))/2h in h^2 instead.
    """
    h1, h2 = hs
    L0 = lax_matrix(x0, c)

    def q_at(t):
        return projection_point(x0, c, t, L0=L0).q

    if scheme == "forward":
        d1 = (q_at(h1) - x0.q) / h1
        d2 = (q_at(h2) - x0.q) / h2
        return (h1 * d2 - h2 * d1) / (h1 - h2)
    if scheme != "central":
        raise ValueError(f"unknown scheme {scheme!r}")
    d1 = (q_at(h1) - q_at(-h1)) / (2 * h1)
    d2 = (q_at(h2) - q_at(-h2)) / (2 * h2)
    return (h1 ** 2 * d2 - h2 ** 2 * d1) / (h1 ** 2 - h2 ** 2)


def check_time_normalization(x0: PhasePoint, c: CouplingParams, tol: float = 1e-6, *,
                             scheme: str = "central") -> float:
    """Require dq/dt|_0 = p_0 along the projection flow; returns the error."""
    err = float(np.max(np.abs(short_time_velocity(x0, c, scheme=scheme) - x0.p)))
    if not err <= tol:
        raise RuntimeError(
            f"projection time normalisation fails: |dq/dt(0) - p| = {err:.3e} > {tol:g}")
    return err
