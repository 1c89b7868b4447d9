"""``suther-lax``: verification sweeps, simulations, projection runs, r-matrix dumps.

Exit codes: 0 success, 1 a check failed, 2 bad configuration, 3 run aborted.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from ._accel import backend_name
from .dynamics import (
    EigenvalueCollisionError,
    IntegratorConfig,
    WallApproachError,
    check_time_normalization,
    integrate,
    lax_residual_series,
    projection_solve,
    spectral_drift_series,
)
from .liealg import build_basis
from .model import (
    ChamberError,
    CouplingError,
    CouplingParams,
    PhasePoint,
    chamber_gap,
    r_coefficients,
    r_matrix_standard,
    tensor_from_coefficients,
)
from .parallel import worker_count
from .report import SCHEMA, csv_text, dumps
from .sampling import check_seed, sample_dilute_point, sample_point, stream
from .verify import run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3

PROJECT_GAP = 0.3
PROJECT_TOL = 1e-6
PROJECT_TOL_TIGHT = 1e-5
ORACLE_TOL = 1e-6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 2
    mu: float = 1.0
    nu: float = 1.2
    kappa: float = 0.7
    seed: int = 0
    samples: int = 100
    method: Optional[str] = None
    dt: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    t_end: float = 2.0
    stride: int = 1
    q: Optional[tuple] = None
    p: Optional[tuple] = None
    out: Optional[str] = None
    format: Optional[str] = None

    def couplings(self) -> CouplingParams:
        return CouplingParams(self.mu, self.nu, self.kappa)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(method=self.method or "rk45", dt=self.dt, rtol=self.rtol, atol=self.atol,
                                t_end=self.t_end, stride=self.stride)

    def fmt(self) -> str:
        if self.format:
            return self.format
        return "csv" if self.command in ("simulate", "project") else "json"

    def explicit_point(self) -> Optional[PhasePoint]:
        if self.q is None:
            return None
        p = self.p if self.p is not None else (0.0,) * len(self.q)
        return PhasePoint(np.array(self.q), np.array(p))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method or "rk45"
        d["format"] = self.fmt()
        d.pop("out")
        return d


KEYS = {f.name for f in fields(RunConfig)} - {"command"}


def _floats(text) -> tuple:
    if isinstance(text, (list, tuple)):
        vals = text
    else:
        vals = [s for s in str(text).split(",") if s.strip()]
    try:
        return tuple(float(v) for v in vals)
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    a = common.add_argument
    a("--n", type=int)
    a("--mu", type=float)
    a("--nu", type=float)
    a("--kappa", type=float)
    a("--seed", type=int)
    a("--samples", type=int)
    a("--q", type=str, help="comma-separated positions q_1 > ... > q_n > 0")
    a("--p", type=str, help="comma-separated momenta")
    a("--method", choices=("rk4", "rk45"))
    a("--dt", type=float)
    a("--rtol", type=float)
    a("--atol", type=float)
    a("--t-end", dest="t_end", type=float)
    a("--stride", type=int)
    a("--out", type=str)
    a("--format", choices=("csv", "json"))
    a("--config", type=str, help="JSON file with any of the options above; flags win")

    parser = argparse.ArgumentParser(prog="suther-lax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the property suite on seeded samples")
    sub.add_parser("simulate", parents=[common], help="integrate Hamilton's equations with diagnostics")
    sub.add_parser("project", parents=[common], help="compare the projection method with the ODE")
    sub.add_parser("rmatrix", parents=[common], help="dump the r-matrix at an explicit q")
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config file {ns.config}: {err}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for k, v in data.items():
            key = k.replace("-", "_")
            if key == "command":
                continue
            if key not in KEYS:
                raise ConfigError(f"unknown config key {k!r}")
            merged[key] = v
    for key in KEYS:
        v = getattr(ns, key, None)
        if v is not None:
            merged[key] = v
    for key in ("q", "p"):
        if key in merged:
            merged[key] = _floats(merged[key])
    if "q" in merged and "n" not in merged:
        merged["n"] = len(merged["q"])
    try:
        cfg = RunConfig(command=ns.command, **merged)
    except TypeError as err:
        raise ConfigError(str(err)) from None
    validate(cfg, explicit=set(merged))
    return cfg


def validate(cfg: RunConfig, explicit=frozenset()) -> None:
    """Re-check every numeric constraint before any work starts."""
    if not isinstance(cfg.n, int) or cfg.n < 1:
        raise ConfigError(f"n must be a positive integer, got {cfg.n!r}")
    try:
        cfg.couplings()
    except CouplingError as err:
        raise ConfigError(f"invalid couplings: {err}") from None
    try:
        check_seed(cfg.seed)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from None
    if not isinstance(cfg.samples, int) or cfg.samples < 1:
        raise ConfigError(f"samples must be a positive integer, got {cfg.samples!r}")
    if cfg.method == "rk4" and explicit & {"rtol", "atol"}:
        raise ConfigError("rtol/atol apply to rk45 only; rk4 takes dt")
    try:
        cfg.integrator()
    except ValueError as err:
        raise ConfigError(f"invalid integrator settings: {err}") from None
    if cfg.p is not None and cfg.q is None:
        raise ConfigError("--p needs --q")
    if cfg.q is not None:
        if len(cfg.q) != cfg.n:
            raise ConfigError(f"--q has {len(cfg.q)} entries but n={cfg.n}")
        if cfg.p is not None and len(cfg.p) != cfg.n:
            raise ConfigError(f"--p has {len(cfg.p)} entries but n={cfg.n}")
        try:
            cfg.explicit_point()
        except (ChamberError, ValueError) as err:
            raise ConfigError(str(err)) from None
    elif cfg.command == "rmatrix":
        raise ConfigError("rmatrix needs an explicit --q")
    try:
        worker_count()
    except ValueError as err:
        raise ConfigError(str(err)) from None


def _header(cfg: RunConfig) -> dict:
    return {"schema": SCHEMA, "command": cfg.command, "backend": backend_name(), "config": cfg.as_dict()}


def _emit(cfg: RunConfig, data: str, summary: Optional[str] = None) -> None:
    """Data goes to --out (or stdout); a separate summary goes to stdout (or stderr)."""
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(data)
        if summary is not None:
            sys.stdout.write(summary)
    else:
        sys.stdout.write(data)
        if summary is not None:
            sys.stderr.write(summary)


def _point_dict(x: PhasePoint) -> dict:
    return {"q": x.q.tolist(), "p": x.p.tolist()}


# --- commands ---------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    results = run_suite(cfg.n, cfg.couplings(), cfg.seed, cfg.samples)
    ok = all(r.passed for r in results)
    if cfg.fmt() == "csv":
        rows = [(r.name, r.tol, r.mode, r.residual, r.worst_sample, str(r.passed).lower()) for r in results]
        _emit(cfg, csv_text(("check", "tolerance", "mode", "residual", "worst_sample", "passed"), rows))
    else:
        rep = _header(cfg)
        rep["checks"] = [{"name": r.name, "tolerance": r.tol, "mode": r.mode, "residual": r.residual,
                          "worst_sample": r.worst_sample, "passed": r.passed} for r in results]
        rep["passed"] = ok
        _emit(cfg, dumps(rep))
    return EXIT_OK if ok else EXIT_FAIL


def _initial_point(cfg: RunConfig, dilute: bool) -> PhasePoint:
    x = cfg.explicit_point()
    if x is not None:
        return x
    rng = stream(cfg.seed, 0)
    return sample_dilute_point(rng, cfg.n) if dilute else sample_point(rng, cfg.n, PROJECT_GAP)


def _trajectory_rows(traj, c):
    spec = spectral_drift_series(traj, c)
    lax = lax_residual_series(traj, c) if len(traj) >= 3 else np.full(len(traj), np.nan)
    rows = []
    for i in range(len(traj)):
        rows.append([float(traj.times[i]), *map(float, traj.q[i]), *map(float, traj.p[i]),
                     float(traj.energy[i]), float(spec[i]), float(lax[i])])
    return rows, spec, lax


def cmd_simulate(cfg: RunConfig) -> int:
    c = cfg.couplings()
    x0 = _initial_point(cfg, dilute=True)
    icfg = cfg.integrator()
    status, reason = EXIT_OK, None
    try:
        traj = integrate(x0, c, icfg)
    except WallApproachError as err:
        traj, status, reason = err.trajectory, EXIT_ABORT, str(err)
    n = cfg.n
    header = ["t", *[f"q_{i}" for i in range(1, n + 1)], *[f"p_{i}" for i in range(1, n + 1)],
              "H", "spec_drift", "lax_residual"]
    rows, spec, lax = _trajectory_rows(traj, c)
    summary = _header(cfg)
    summary.update({
        "initial": _point_dict(x0),
        "samples": len(traj),
        "t_final": float(traj.times[-1]),
        "max_energy_drift": float(np.max(np.abs(traj.energy - traj.energy[0]))),
        "final_spec_drift": float(spec[-1]),
        "max_spec_drift": float(np.max(spec)),
        "max_lax_residual": float(np.nanmax(lax)) if np.any(np.isfinite(lax)) else None,
        "aborted": status == EXIT_ABORT,
        "abort_reason": reason,
    })
    if cfg.fmt() == "csv":
        _emit(cfg, csv_text(header, rows), dumps(summary))
    else:
        summary["columns"] = header
        summary["rows"] = rows
        _emit(cfg, dumps(summary))
    return status


def cmd_project(cfg: RunConfig) -> int:
    c = cfg.couplings()
    x0 = _initial_point(cfg, dilute=False)
    gap = chamber_gap(x0.q)
    tol = PROJECT_TOL if gap >= PROJECT_GAP else PROJECT_TOL_TIGHT
    summary = _header(cfg)
    summary["initial"] = _point_dict(x0)
    summary["chamber_gap"] = gap
    summary["tolerance"] = tol
    summary["tolerance_note"] = (None if tol == PROJECT_TOL else
                                 f"relaxed from {PROJECT_TOL:g}: initial chamber gap below {PROJECT_GAP:g}")
    try:
        summary["oracle_error"] = check_time_normalization(x0, c, tol=float("inf"))
    except (EigenvalueCollisionError, ChamberError) as err:
        summary.update({"aborted": True, "abort_reason": str(err)})
        sys.stdout.write(dumps(summary))
        return EXIT_ABORT
    summary["oracle_passed"] = summary["oracle_error"] <= ORACLE_TOL
    if not summary["oracle_passed"]:
        summary["passed"] = False
        sys.stdout.write(dumps(summary))
        return EXIT_FAIL
    icfg = cfg.integrator()
    times = icfg.sample_times()
    try:
        proj = projection_solve(x0, c, times)
        ode = integrate(x0, c, IntegratorConfig(method="rk45", rtol=cfg.rtol, atol=cfg.atol,
                                                t_end=cfg.t_end, dt=cfg.dt, stride=cfg.stride),
                        times=times, diagnostics=False)
    except (EigenvalueCollisionError, ChamberError, WallApproachError) as err:
        summary.update({"aborted": True, "abort_reason": str(err)})
        sys.stdout.write(dumps(summary))
        return EXIT_ABORT
    diff = np.max(np.abs(proj.q - ode.q), axis=1)
    n = cfg.n
    header = ["t", *[f"q_proj_{i}" for i in range(1, n + 1)], *[f"q_ode_{i}" for i in range(1, n + 1)], "maxdiff"]
    rows = [[float(t), *map(float, proj.q[i]), *map(float, ode.q[i]), float(diff[i])] for i, t in enumerate(times)]
    sup = float(np.max(diff))
    summary.update({"samples": len(times), "maxdiff": sup,
                    "maxdiff_p": float(np.max(np.abs(proj.p - ode.p))), "passed": sup < tol})
    if cfg.fmt() == "csv":
        _emit(cfg, csv_text(header, rows), dumps(summary))
    else:
        summary["columns"] = header
        summary["rows"] = rows
        _emit(cfg, dumps(summary))
    return EXIT_OK if sup < tol else EXIT_FAIL


def label_str(label) -> str:
    if label[0] == "D":
        return f"D{label[1]}_{label[2]}"
    _, alpha, sign, part = label
    return f"X{sign}{part}[{alpha}]"


def rmatrix_records(q, rel_cut: float = 1e-14) -> dict:
    """Nonzero entries of r_12(q) in the basis-coefficient and matrix-unit views.

    Standard-view indices are 1-based (i, k) / (j, l) for e_ij (x) e_kl.
    """
    q = np.asarray(q, dtype=float)
    basis = build_basis(q.shape[0])
    coeffs = r_coefficients(q, basis)
    std = r_matrix_standard(q)
    N = 2 * q.shape[0]
    basis_recs = []
    for A, B in zip(*np.nonzero(np.abs(coeffs) > rel_cut * np.max(np.abs(coeffs)))):
        basis_recs.append({"row": [int(A)], "col": [int(B)], "row_label": label_str(basis.labels[A]),
                           "col_label": label_str(basis.labels[B]), "re": float(coeffs[A, B]), "im": 0.0})
    std_recs = []
    for R, Cc in zip(*np.nonzero(np.abs(std) > rel_cut * np.max(np.abs(std)))):
        i, k = divmod(int(R), N)
        j, l = divmod(int(Cc), N)
        v = std[R, Cc]
        std_recs.append({"row": [i + 1, k + 1], "col": [j + 1, l + 1], "re": float(v.real), "im": float(v.imag)})
    agree = float(np.max(np.abs(tensor_from_coefficients(coeffs, basis) - std)))
    return {"basis": basis_recs, "standard": std_recs, "views_agree_residual": agree}


def cmd_rmatrix(cfg: RunConfig) -> int:
    recs = rmatrix_records(cfg.q)
    if cfg.fmt() == "csv":
        rows = []
        for view in ("basis", "standard"):
            for r in recs[view]:
                rows.append((view, ";".join(map(str, r["row"])), ";".join(map(str, r["col"])), r["re"], r["im"]))
        _emit(cfg, csv_text(("view", "row", "col", "re", "im"), rows))
    else:
        rep = _header(cfg)
        rep["q"] = list(cfg.q)
        rep.update(recs)
        _emit(cfg, dumps(rep))
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "simulate": cmd_simulate, "project": cmd_project, "rmatrix": cmd_rmatrix}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_CONFIG if err.code else EXIT_OK
    try:
        cfg = resolve_config(ns)
    except ConfigError as err:
        print(f"suther-lax: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg)
    except (WallApproachError, EigenvalueCollisionError) as err:
        print(f"suther-lax: aborted: {err}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
