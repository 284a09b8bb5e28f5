"""Kernel backend selection.

The hot numeric paths (exhaustive scans, annealing loops, alternating
reassignment) have two interchangeable implementations: a numba-JIT one and a
pure-numpy one.  ``BLOCKINFER_BACKEND`` picks explicitly ("numba" or "numpy");
unset, numba is used when importable and numpy otherwise.
"""

from __future__ import annotations

import os

_requested = os.environ.get("BLOCKINFER_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"BLOCKINFER_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import _kernels_numpy as kernels
    BACKEND = "numpy"
elif _requested == "numba":
    from . import _kernels_numba as kernels
    BACKEND = "numba"
else:
    try:
        from . import _kernels_numba as kernels
        BACKEND = "numba"
    except ImportError:
        from . import _kernels_numpy as kernels
        BACKEND = "numpy"

__all__ = ["kernels", "BACKEND"]
