"""Numba switch.

Kernels in :mod:`occtrack.kernels` come in two flavours, a numba ``@njit``
loop and a vectorised numpy version.  The public entry points dispatch on
``USE_NUMBA``, which is read once at import from ``OCCTRACK_DISABLE_NUMBA``.
"""
import os

_FLAG = os.environ.get("OCCTRACK_DISABLE_NUMBA", "").strip().lower()

try:
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise.

    The jitted object is created even when ``USE_NUMBA`` is off so the
    benchmark can compare both paths in one process.
    """
    if HAS_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
