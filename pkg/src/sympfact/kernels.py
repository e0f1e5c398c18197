"""Kernel selection.

The compiled extension ``sympfact._kernels`` is used when it imports; otherwise
the pure-Python twin ``sympfact._kernels_py`` is used.  Setting the environment
variable ``SYMPFACT_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SYMPFACT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

gauss_matmul = _impl.gauss_matmul
gauss_is_identity = _impl.gauss_is_identity


def backend_module(name):
    """Return the kernel module for ``"python"`` or ``"cython"`` (raises ImportError)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
