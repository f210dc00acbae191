"""Backend selection for the hot kernels.

The accelerated kernels are used when numba imports cleanly; setting
``PHYLAB_NO_NUMBA=1`` (or numba being absent) selects the pure
NumPy/Python reference kernels instead.  Both backends stay importable
directly for side-by-side testing and benchmarking.
"""

from __future__ import annotations

import os

_flag = os.environ.get("PHYLAB_NO_NUMBA", "").strip().lower()
_disabled = _flag in ("1", "true", "yes", "on")

if not _disabled:
    try:
        from . import backend_numba as kernels
    except ImportError:
        from . import backend_numpy as kernels
else:
    from . import backend_numpy as kernels

ACTIVE_BACKEND = kernels.NAME

viterbi_forward = kernels.viterbi_forward
viterbi_traceback = kernels.viterbi_traceback
lms_equalize = kernels.lms_equalize
mlse_detect = kernels.mlse_detect
