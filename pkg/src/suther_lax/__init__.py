"""Lax matrix, dynamical r-matrix and flows of the hyperbolic BC_n Sutherland model."""
from ._accel import backend_name
from .liealg import BasisSet, RootLabel, build_basis, build_C, casimir
from .model import (
    ChamberError,
    ConsistencyError,
    CouplingError,
    CouplingParams,
    PhasePoint,
    hamiltonian,
    lax_matrix,
    make_couplings,
    r_matrix_basis,
    r_matrix_standard,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name", "BasisSet", "RootLabel", "build_basis", "build_C", "casimir",
    "ChamberError", "ConsistencyError", "CouplingError", "CouplingParams", "PhasePoint",
    "hamiltonian", "lax_matrix", "make_couplings", "r_matrix_basis", "r_matrix_standard",
]
