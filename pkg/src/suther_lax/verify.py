"""The property suite behind ``suther-lax verify``.

Each check maps one seeded sample to a residual.  Residuals are aggregated
over samples into a max (or a min, for contrast checks that must *exceed*
a threshold) and compared against a fixed tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .liealg import build_basis, cartan_q, gram_matrix
from .model import (
    CouplingParams,
    PhasePoint,
    b_matrix_closed,
    b_matrix_from_r,
    bl_commutator_closed,
    hamiltonian,
    hyperbolic_identity,
    lax_matrix,
    r_dynamical_part,
    r_matrix_basis,
    r_matrix_standard,
    R_apply,
    R_apply_trace,
)
from .parallel import parallel_map
from .poisson import involution_matrix, rmatrix_identity_residual
from .sampling import sample_point, stream

DEFAULT_GAP = 0.1
CONTRAST_KAPPA = 0.5


# --- per-sample residuals ---------------------------------------------------

def basis_residual(x: PhasePoint, c: CouplingParams, rng) -> float:
    basis = build_basis(x.n)
    err = float(np.max(np.abs(gram_matrix(basis) - np.diag(basis.norms))))
    Q = cartan_q(x.q)
    flip = {"+": "-", "-": "+"}
    for label in basis.labels:
        if label[0] != "X":
            continue
        _, alpha, sign, part = label
        X = basis.X(alpha, sign, part)
        want = alpha.value(x.q) * basis.X(alpha, flip[sign], part)
        err = max(err, float(np.max(np.abs(Q @ X - X @ Q - want))))
    return err


def hamiltonian_residual(x, c, rng) -> float:
    L = lax_matrix(x, c)
    return abs(hamiltonian(x, c) - 0.25 * np.real(np.trace(L @ L)))


def r_dual_residual(x, c, rng) -> float:
    return float(np.max(np.abs(r_matrix_basis(x.q) - r_matrix_standard(x.q))))


def R_dual_residual(x, c, rng) -> float:
    basis = build_basis(x.n)
    r = r_matrix_basis(x.q, basis)
    err = 0.0
    for Y in (lax_matrix(x, c), basis.expand(rng.normal(size=len(basis)))):
        err = max(err, float(np.max(np.abs(R_apply(x.q, Y, basis) - R_apply_trace(x.q, Y, r)))))
    return err


def B_dual_residual(x, c, rng) -> float:
    B = b_matrix_closed(x.q, c)
    B1 = b_matrix_from_r(x.q, c, p=x.p)
    B2 = b_matrix_from_r(x.q, c, p=rng.normal(size=x.n))
    return float(max(np.max(np.abs(B - B1)), np.max(np.abs(B1 - B2))))


def BL_residual(x, c, rng) -> float:
    B = b_matrix_closed(x.q, c)
    L = lax_matrix(x, c)
    return float(np.max(np.abs(bl_commutator_closed(x, c) - (B @ L - L @ B))))


def bracket_residual(x, c, rng) -> float:
    return rmatrix_identity_residual(x, c, r_matrix_standard(x.q)).residual_max


def bracket_fd_residual(x, c, rng) -> float:
    return rmatrix_identity_residual(x, c, r_matrix_standard(x.q), method="fd").residual_max


def involution_max(x, c, rng) -> float:
    return float(np.max(involution_matrix(x, c)))


def _cn_couplings(c: CouplingParams, kappa: float) -> CouplingParams:
    return CouplingParams(c.mu, c.nu, kappa)


def cn_residual(x, c, rng) -> float:
    """Bracket identity with kappa = 0 and only the q-dependent part of r."""
    c0 = _cn_couplings(c, 0.0)
    return rmatrix_identity_residual(x, c0, r_dynamical_part(x.q)).residual_max


def cn_contrast(x, c, rng) -> float:
    """Same truncated r at kappa = 0.5 (or -0.5 if nu = -0.5): must fail."""
    k = CONTRAST_KAPPA if c.nu != -CONTRAST_KAPPA else -CONTRAST_KAPPA
    return rmatrix_identity_residual(x, _cn_couplings(c, k), r_dynamical_part(x.q)).residual_max


def hyperbolic_residual(x, c, rng) -> float:
    u, v = rng.uniform(0.3, 3.0, size=2) * rng.choice([-1.0, 1.0], size=2)
    if u + v == 0:
        v = -2 * v
    lhs, rhs = hyperbolic_identity(float(u), float(v))
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    fn: Callable
    above: bool = False  # pass iff every residual exceeds tol

    def passes(self, value: float) -> bool:
        return value > self.tol if self.above else value < self.tol


CHECKS = (
    Check("basis_relations", 1e-12, basis_residual),
    Check("hamiltonian_lax", 1e-10, hamiltonian_residual),
    Check("r_basis_vs_standard", 1e-12, r_dual_residual),
    Check("R_dual_construction", 1e-12, R_dual_residual),
    Check("B_dual_construction", 1e-12, B_dual_residual),
    Check("BL_commutator", 1e-10, BL_residual),
    Check("bracket_identity", 1e-8, bracket_residual),
    Check("bracket_identity_fd", 1e-5, bracket_fd_residual),
    Check("involution", 1e-9, involution_max),
    Check("cn_specialization", 1e-8, cn_residual),
    Check("cn_contrast", 1e-3, cn_contrast, above=True),
    Check("hyperbolic_identity", 1e-12, hyperbolic_residual),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    tol: float
    residual: float
    worst_sample: int
    passed: bool
    mode: str


def _sample_residuals(n, c, seed, gap, checks, index):
    rng = stream(seed, index)
    x = sample_point(rng, n, gap)
    # each check gets its own child stream so adding checks never shifts others
    out = []
    for k, chk in enumerate(checks):
        out.append(float(chk.fn(x, c, stream(seed, index, k + 1))))
    return out


def run_suite(n: int, c: CouplingParams, seed: int, samples: int, *, gap: float = DEFAULT_GAP,
              checks=CHECKS) -> list[CheckResult]:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rows = parallel_map(lambda i: _sample_residuals(n, c, seed, gap, checks, i), range(samples))
    vals = np.array(rows)
    results = []
    for k, chk in enumerate(checks):
        col = vals[:, k]
        worst = int(np.argmin(col) if chk.above else np.argmax(col))
        results.append(CheckResult(chk.name, chk.tol, float(col[worst]), worst,
                                   all(chk.passes(v) for v in col), "min_above" if chk.above else "max_below"))
    return results
