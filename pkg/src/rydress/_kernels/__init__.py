"""Kernel backend selection: compiled extension if available, else pure Python.

Set ``RYDRESS_BACKEND=python`` or ``=compiled`` to force a choice (the
benchmark suite uses this to compare the two).
"""

import os
import warnings

from . import _rk_py
from ._rk_py import (  # noqa: F401  (re-exported for the propagator)
    N_PARAMS,
    STATUS_OK,
    STATUS_TOO_MANY_STEPS,
    STATUS_UNDERFLOW,
    envelope_at,
    hamiltonian_at,
    propagate_expm,
)

try:
    from . import _rk_cy

    HAVE_COMPILED = True
except ImportError:
    _rk_cy = None
    HAVE_COMPILED = False


def get_adaptive_kernel(backend: str = "auto"):
    """Return (propagate_adaptive, backend_name) for the requested backend."""
    if backend == "auto":
        backend = os.environ.get("RYDRESS_BACKEND", "auto")
    if backend in ("auto", "compiled") and HAVE_COMPILED:
        return _rk_cy.propagate_adaptive, "compiled"
    if backend == "compiled":
        raise ImportError(
            "compiled kernel requested but the extension is not built; "
            "run `pip install -e . --no-build-isolation`"
        )
    if backend == "auto" and not HAVE_COMPILED:
        warnings.warn(
            "compiled propagation kernel not found; falling back to the pure-Python "
            "kernel (Monte Carlo sweeps will be slow)",
            RuntimeWarning,
            stacklevel=2,
        )
    return _rk_py.propagate_adaptive, "python"
