"""Hot numeric kernels, dispatched to numba or numpy.

Both implementations stay importable (``kernels.numpy_impl`` and, when numba
is installed, ``kernels.numba_impl``) so tests and the benchmark can compare
them directly; the module-level names point at the active backend.
"""
from .._accel import HAVE_NUMBA, USE_NUMBA, backend_name
from . import _numpy as numpy_impl

if HAVE_NUMBA:
    from . import _numba as numba_impl
else:  # pragma: no cover
    numba_impl = None

_active = numba_impl if USE_NUMBA else numpy_impl

lax_matrix = _active.lax_matrix
hamiltonian = _active.hamiltonian
grad_q_hamiltonian = _active.grad_q_hamiltonian
lax_partials_q = _active.lax_partials_q
b_closed = _active.b_closed
chamber_gap = _active.chamber_gap
rk4 = _active.rk4

__all__ = [
    "backend_name", "numpy_impl", "numba_impl",
    "lax_matrix", "hamiltonian", "grad_q_hamiltonian", "lax_partials_q",
    "b_closed", "chamber_gap", "rk4",
]
