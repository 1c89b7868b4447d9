"""Backend selection for the hot kernels.

Set ``SUTHER_LAX_DISABLE_NUMBA=1`` to force the pure-numpy path.  The flag is
read once, at import time.
"""
import os

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba comes with the "fast" extra
    HAVE_NUMBA = False

NUMBA_DISABLED = os.environ.get("SUTHER_LAX_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
