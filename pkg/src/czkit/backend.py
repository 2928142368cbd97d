"""Kernel backend selection.

The compiled extension ``czkit._core`` is used when it imports; otherwise
the numpy twins in ``czkit._pykernels`` take over.  ``CZKIT_BACKEND=python``
forces the fallback, ``CZKIT_BACKEND=cython`` makes a missing extension an
import error.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

_choice = os.environ.get("CZKIT_BACKEND", "auto").lower()

try:
    from . import _core as _compiled
except ImportError:  # pragma: no cover - depends on build
    _compiled = None

if _choice not in ("auto", "cython", "python"):
    raise ImportError(f"CZKIT_BACKEND must be auto, cython or python, got {_choice!r}")
if _choice == "cython" and _compiled is None:
    raise ImportError("CZKIT_BACKEND=cython but the compiled extension is not built")

kernels: ModuleType = _pykernels if (_choice == "python" or _compiled is None) else _compiled
BACKEND: str = "python" if kernels is _pykernels else "cython"


def available() -> dict[str, ModuleType]:
    """All importable backends by name."""
    found = {"python": _pykernels}
    if _compiled is not None:
        found["cython"] = _compiled
    return found
