"""Backend selection for the hot kernels.

The compiled extension ``hyplap._ckernels`` is used when it imports; the
numpy module ``hyplap._kernels`` is the fallback. Setting the environment
variable ``HYPLAP_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels as py_backend

try:
    if os.environ.get("HYPLAP_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

c_backend = _compiled
BACKEND = "cython" if _compiled is not None else "python"
_active = _compiled if _compiled is not None else py_backend

edge_extrema = _active.edge_extrema
ae_p2_sweep = _active.ae_p2_sweep
ae_residual = _active.ae_residual
ae_step = _active.ae_step
ae_jacobi_sweep = _active.ae_jacobi_sweep
fce_residual = _active.fce_residual
fce_step = _active.fce_step
fh_value = _active.fh_value
fh_subgradient = _active.fh_subgradient
fh_subgrad_run = _active.fh_subgrad_run
tau_schedule = py_backend.tau_schedule


def available_backends():
    out = {"python": py_backend}
    if c_backend is not None:
        out["cython"] = c_backend
    return out
