"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (with its worst residual and runtime);
the lines are printed in the pytest terminal summary.  The file also runs
standalone: ``python tests/test_acceptance.py``.
"""
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from suther_lax.cli import RunConfig, cmd_verify
from suther_lax.dynamics import (
    IntegratorConfig,
    Trajectory,
    check_time_normalization,
    energy_drift,
    integrate,
    lax_residual,
    projection_solve,
    spectral_drift,
)
from suther_lax.liealg import build_basis, cartan_q
from suther_lax.model import (
    CouplingParams,
    R_apply,
    R_apply_trace,
    b_matrix_closed,
    b_matrix_from_r,
    bl_commutator_closed,
    hamiltonian,
    lax_matrix,
    r_dynamical_part,
    r_matrix_basis,
    r_matrix_standard,
)
from suther_lax.poisson import involution_matrix, rmatrix_identity_residual
from suther_lax.sampling import sample_couplings, sample_dilute_point, sample_point, stream

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES, DEFAULT  # noqa: E402

SEED = 20240601


def record(num, title, ok, detail, elapsed, limit):
    within = limit is None or elapsed < limit
    budget = f"{elapsed:.1f} s" + (f" < {limit:g} s" if limit else "")
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {num:>2} [{status}] {title}: {detail} ({budget})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok and within


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def chamber_points(seed, n, count, gap=0.1):
    for i in range(count):
        rng = stream(seed, i)
        yield sample_couplings(rng), sample_point(rng, n, gap)


# --- criteria ---------------------------------------------------------------

def criterion_1():
    worst_gram = worst_comm = 0.0
    flip = {"+": "-", "-": "+"}
    for n in range(1, 7):
        b = build_basis(n)
        E = b.elements
        gram = np.einsum("aij,bji->ab", E, E)
        want = np.diag([-1.0 if (lab[1] if lab[0] == "D" else lab[2]) == "+" else 1.0 for lab in b.labels])
        worst_gram = max(worst_gram, np.max(np.abs(gram - want)))
        for i in range(20):
            q = np.cumsum(stream(SEED + 1, n * 100 + i).uniform(0.1, 1.1, n))[::-1]
            Q = cartan_q(q)
            for lab in b.labels:
                if lab[0] == "X":
                    _, alpha, s, part = lab
                    X = b.X(alpha, s, part)
                    err = np.max(np.abs(Q @ X - X @ Q - alpha.value(q) * b.X(alpha, flip[s], part)))
                    worst_comm = max(worst_comm, err)
    ok = worst_gram < 1e-12 and worst_comm < 1e-12
    return ok, f"gram {worst_gram:.1e}, [Q,X] {worst_comm:.1e} (tol 1e-12)"


def criterion_2():
    rng = stream(SEED + 2, 0)
    triples = [sample_couplings(rng) for _ in range(8)]
    triples += [CouplingParams(1.3, -0.9, 0.0), CouplingParams(-0.7, 1.6, -0.8)]
    assert any(c.kappa == 0 for c in triples) and any(c.kappa < 0 for c in triples)
    worst = 0.0
    for ci, c in enumerate(triples):
        for n in (1, 2, 3, 4):
            for i in range(100):
                x = sample_point(stream(SEED + 2, 1 + ci * 1000 + n * 100 + i), n)
                L = lax_matrix(x, c)
                worst = max(worst, abs(hamiltonian(x, c) - 0.25 * np.trace(L @ L)))
    return worst < 1e-10, f"max |H - tr L^2/4| {worst:.1e} over 10 triples (tol 1e-10)"


def criterion_3():
    worst = 0.0
    for n in (1, 2, 3):
        for _, x in chamber_points(SEED + 3, n, 20):
            worst = max(worst, np.max(np.abs(r_matrix_basis(x.q) - r_matrix_standard(x.q))))
    return worst < 1e-12, f"max tensor difference {worst:.1e} (tol 1e-12)"


def criterion_4():
    an = fd = 0.0
    for n in (1, 2, 3, 4):
        for c, x in chamber_points(SEED + 4 + n, n, 100):
            r = r_matrix_standard(x.q)
            an = max(an, rmatrix_identity_residual(x, c, r).residual_max)
            fd = max(fd, rmatrix_identity_residual(x, c, r, method="fd").residual_max)
    return an < 1e-8 and fd < 1e-5, f"analytic {an:.1e} (tol 1e-8), fd {fd:.1e} (tol 1e-5)"


def criterion_5():
    zero, contrast = 0.0, np.inf
    for n in (1, 2, 3, 4):
        for c, x in chamber_points(SEED + 4 + n, n, 100):
            r = r_dynamical_part(x.q)
            zero = max(zero, rmatrix_identity_residual(x, CouplingParams(c.mu, c.nu, 0.0), r).residual_max)
            k = 0.5 if c.nu != -0.5 else -0.5
            contrast = min(contrast, rmatrix_identity_residual(x, CouplingParams(c.mu, c.nu, k), r).residual_max)
    ok = zero < 1e-8 and contrast > 1e-3
    return ok, f"kappa=0 max {zero:.1e} (tol 1e-8), kappa=0.5 min {contrast:.1e} (> 1e-3)"


def criterion_6():
    eR = eB = eP = eBL = 0.0
    for n in (1, 2, 3):
        basis = build_basis(n)
        for i, (c, x) in enumerate(chamber_points(SEED + 6 + n, n, 50)):
            rng = stream(SEED + 6 + n, i, 1)
            r = r_matrix_basis(x.q, basis)
            for Y in (lax_matrix(x, c), basis.expand(rng.normal(size=len(basis)))):
                eR = max(eR, np.max(np.abs(R_apply(x.q, Y, basis) - R_apply_trace(x.q, Y, r))))
            B = b_matrix_closed(x.q, c)
            B1 = b_matrix_from_r(x.q, c, p=x.p, basis=basis)
            B2 = b_matrix_from_r(x.q, c, p=rng.normal(size=n), basis=basis)
            eB = max(eB, np.max(np.abs(B - B1)))
            eP = max(eP, np.max(np.abs(B1 - B2)))
            L = lax_matrix(x, c)
            eBL = max(eBL, np.max(np.abs(bl_commutator_closed(x, c, basis) - (B @ L - L @ B))))
    ok = eR < 1e-12 and eB < 1e-12 and eP < 1e-12 and eBL < 1e-10
    return ok, f"R {eR:.1e}, B {eB:.1e}, B(p) {eP:.1e} (tol 1e-12); [B,L] {eBL:.1e} (tol 1e-10)"


def criterion_7(per_n=20):
    cfg = IntegratorConfig(method="rk4", dt=1e-3, t_end=2.0)
    lax = spec = energy = 0.0
    bent = np.inf
    for n in (2, 3):
        for i in range(per_n):
            x0 = sample_dilute_point(stream(SEED + 7, n * 1000 + i), n)
            traj = integrate(x0, DEFAULT, cfg)
            lax = max(lax, lax_residual(traj, DEFAULT))
            spec = max(spec, spectral_drift(traj, DEFAULT))
            energy = max(energy, energy_drift(traj, DEFAULT))
            off = Trajectory(traj.times, 1.01 * traj.q, traj.p)
            bent = min(bent, lax_residual(off, DEFAULT))
    ok = lax < 1e-5 and spec < 1e-8 and energy < 1e-9 and bent > 1e-3
    return ok, (f"lax {lax:.1e} (tol 1e-5), spectrum {spec:.1e} (tol 1e-8), energy {energy:.1e} (tol 1e-9), "
                f"perturbed {bent:.1e} (> 1e-3)")


def criterion_8(per_n=30):
    times = np.linspace(0.0, 2.0, 81)
    oracle = sup = 0.0
    for n in (1, 2, 3):
        for c, x0 in chamber_points(SEED + 8 + n, n, per_n, gap=0.3):
            oracle = max(oracle, check_time_normalization(x0, c, tol=1e-6))
            proj = projection_solve(x0, c, times)
            ode = integrate(x0, c, IntegratorConfig(t_end=2.0), times=times, diagnostics=False)
            sup = max(sup, np.max(np.abs(proj.q - ode.q)), np.max(np.abs(proj.p - ode.p)))
    return sup < 1e-6, f"oracle {oracle:.1e} (tol 1e-6), sup |proj - rk45| {sup:.1e} (tol 1e-6)"


def criterion_9():
    worst = 0.0
    for n in (1, 2, 3):
        for c, x in chamber_points(SEED + 9 + n, n, 50):
            worst = max(worst, np.max(involution_matrix(x, c)))
    return worst < 1e-9, f"max |{{tr L^j, tr L^k}}| {worst:.1e} (tol 1e-9)"


def criterion_10():
    with tempfile.TemporaryDirectory() as tmp:
        blobs = []
        for k in range(2):
            path = Path(tmp) / f"run{k}.json"
            cfg = RunConfig("verify", n=2, seed=42, samples=20, out=str(path))
            code = cmd_verify(cfg)
            blobs.append(path.read_bytes())
    same = blobs[0] == blobs[1]
    return same and code == 0, f"{len(blobs[0])} bytes, identical={same}, exit={code}"


CRITERIA = [
    (1, "basis integrity", criterion_1, 5),
    (2, "Hamiltonian-Lax consistency", criterion_2, 5),
    (3, "r-matrix dual construction", criterion_3, 10),
    (4, "r-matrix bracket identity", criterion_4, 60),
    (5, "C_n specialization", criterion_5, 20),
    (6, "R/B dual constructions", criterion_6, 20),
    (7, "Lax equation and isospectrality", criterion_7, 60),
    (8, "projection method", criterion_8, 30),
    (9, "involution", criterion_9, 30),
    (10, "determinism", criterion_10, None),
]


@pytest.mark.parametrize("num, title, fn, limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, limit):
    (ok, detail), elapsed = timed(fn)
    assert record(num, title, ok, detail, elapsed, limit), ACCEPTANCE_LINES[-1]


if __name__ == "__main__":
    results = []
    for num, title, fn, limit in CRITERIA:
        (ok, detail), elapsed = timed(fn)
        results.append(record(num, title, ok, detail, elapsed, limit))
    sys.exit(0 if all(results) else 1)
