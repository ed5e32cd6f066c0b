"""Numba acceleration switch for the hot numeric kernels.

Set OPINIONTRACK_NO_NUMBA=1 to force the pure-numpy fallbacks (useful for
debugging and for the kernel benchmark). The decision is made once at
import time.
"""

from __future__ import annotations

import os

NUMBA_ENABLED = os.environ.get("OPINIONTRACK_NO_NUMBA", "") not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        """No-op decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn
        return wrap
