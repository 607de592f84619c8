"""Selects between numba-compiled loop kernels and pure numpy fallbacks.

Set ``SUPERLAB_DISABLE_NUMBA=1`` before import to force the numpy path.
If numba is not installed the numpy path is used silently.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

_disabled = os.environ.get("SUPERLAB_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    if _disabled:
        raise ImportError
    import numba as _nb
except ImportError:  # pragma: no cover - depends on environment
    _nb = None

NUMBA_AVAILABLE = _nb is not None
USE_NUMBA = NUMBA_AVAILABLE


def njit(func):
    """``numba.njit(cache=True, nogil=True)`` when numba is enabled, else the
    plain Python function (still correct, only slow)."""
    if _nb is None:
        return func
    return _nb.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
