"""Backend selection for the hot kernels.

Set ``SP4CERT_DISABLE_NUMBA=1`` to force the pure-numpy path; it is also
used automatically when numba cannot be imported.
"""
import os

from . import _kernels_numpy

_DISABLED = os.environ.get("SP4CERT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

if _DISABLED:
    _kernels_numba = None
else:
    try:
        from . import _kernels_numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _kernels_numba = None

BACKEND = "numpy" if _kernels_numba is None else "numba"
kernels = _kernels_numpy if _kernels_numba is None else _kernels_numba


def get_backend(name=None):
    """Kernel module for ``name`` ('numba' or 'numpy'); the active one by default."""
    if name is None:
        return kernels
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        if _kernels_numba is None:
            from . import _kernels_numba as mod  # raises if unavailable
            return mod
        return _kernels_numba
    raise ValueError(f"unknown backend {name!r}")
