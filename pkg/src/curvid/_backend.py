"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``CURVID_PURE_PYTHON=1`` to force the numpy kernels.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
_compiled = None
if os.environ.get("CURVID_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled

        BACKEND = "cython"
    except ImportError:  # extension not built
        _compiled = None


def kernels(name: str | None = None):
    """Module providing the kernels: ``"cython"``, ``"python"`` or the active one."""
    if name is None:
        name = BACKEND
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    if name == "python":
        return _fallback
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    return _compiled is not None
