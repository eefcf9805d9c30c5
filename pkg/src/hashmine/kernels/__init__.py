"""Hot-kernel backend selection.

Two interchangeable implementations of the inner loops (itemset support
counting, directed triangle counting): a compiled Cython extension and a
pure-Python fallback.  The compiled one is preferred when the build
produced it; set HASHMINE_KERNELS=python or =c to force a backend.
"""
from __future__ import annotations

import os

_forced = os.environ.get("HASHMINE_KERNELS", "").strip().lower()

if _forced == "python":
    from . import _pykernels as _impl

    BACKEND = "python"
elif _forced == "c":
    from . import _ckernels as _impl  # type: ignore[no-redef]

    BACKEND = "c"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

ItemsetCounter = _impl.ItemsetCounter
triangle_participation = _impl.triangle_participation

__all__ = ["BACKEND", "ItemsetCounter", "triangle_participation"]
