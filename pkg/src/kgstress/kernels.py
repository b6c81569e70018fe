"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python module is used. Set ``KGSTRESS_PURE_PYTHON=1`` to force the
fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("KGSTRESS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

brandes_betweenness = _impl.brandes_betweenness
indel_distance = _impl.indel_distance
levenshtein = _impl.levenshtein

__all__ = ["BACKEND", "brandes_betweenness", "indel_distance", "levenshtein"]
