"""Import-time selection of the line-search kernel.

The compiled ``_kernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernel`` is used. ``PROXDESCENT_BACKEND=python`` forces the
fallback, ``PROXDESCENT_BACKEND=compiled`` makes a missing extension an error.
"""
import os

from . import _pykernel

_choice = os.environ.get("PROXDESCENT_BACKEND", "auto").lower()

if _choice == "python":
    _impl = _pykernel
    NAME = "python"
else:
    try:
        from . import _kernels as _impl
        NAME = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _pykernel
        NAME = "python"

ray_minimize = _impl.ray_minimize
ray_delta = _impl.ray_delta

INTERIOR = _pykernel.INTERIOR
AT_ZERO = _pykernel.AT_ZERO
AT_CAP = _pykernel.AT_CAP
NONFINITE = _pykernel.NONFINITE


def available() -> dict:
    """Map backend name to module for every kernel that can be imported."""
    out = {"python": _pykernel}
    try:
        from . import _kernels
        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
