"""Linear advection: explicit/implicit first-order upwind and exact transport.

All functions work for the ``gamma1 < 0`` branch only, with
``gamma1 = -c*N*dt`` (so ``|gamma1|`` is the CFL number).  A problem with
``gamma1 > 0`` is handled by the caller mirroring the grid.

``phi`` may be a scalar or an array; results broadcast accordingly.
"""
from enum import Enum

import numpy as np

from .errors import ConfigurationError, UndefinedMetricError, UnsupportedBranchError

TWO_PI = 2.0 * np.pi


class AdvectionScheme(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    ANALYTIC = "analytic"


def _check(gamma1, phi):
    gamma1 = float(gamma1)
    if not gamma1 < 0.0:
        raise UnsupportedBranchError(
            f"gamma1 must be negative (got {gamma1}); mirror the grid for c < 0")
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0.0) or np.any(phi > 0.5):
        raise ConfigurationError("relative mode phi must lie in [0, 0.5]")
    return gamma1, phi


def _ret(x):
    return x.item() if np.ndim(x) == 0 else x


def advection_multiplier(kind, gamma1, phi):
    """Complex amplification factor of one time step at relative mode ``phi``."""
    kind = AdvectionScheme(kind)
    g, p = _check(gamma1, phi)
    shift = np.exp(-1j * TWO_PI * p)
    if kind is AdvectionScheme.EXPLICIT:
        out = 1.0 + g - g * shift
    elif kind is AdvectionScheme.IMPLICIT:
        out = 1.0 / (1.0 - g + g * shift)
    else:
        out = np.exp(1j * TWO_PI * g * p)
    return _ret(out)


def _sin2(p):
    return np.sin(np.pi * p) ** 2


def advection_magnitude_error(kind, gamma1, phi):
    """Relative magnitude error against exact transport, from the closed forms."""
    kind = AdvectionScheme(kind)
    g, p = _check(gamma1, phi)
    s2 = _sin2(p)
    if kind is AdvectionScheme.EXPLICIT:
        x = 4.0 * g * g * s2 + 4.0 * g * s2 + 1.0
        out = np.cos(0.5 * np.arctan2(0.0, x)) * np.sqrt(np.abs(x)) - 1.0
    elif kind is AdvectionScheme.IMPLICIT:
        out = -1.0 + 1.0 / np.sqrt(4.0 * g * g * s2 - 4.0 * g * s2 + 1.0)
    else:
        raise ConfigurationError("magnitude error is defined for explicit/implicit schemes only")
    return _ret(out)


def advection_magnitude_error_numeric(kind, gamma1, phi):
    """Same quantity as :func:`advection_magnitude_error`, as ``|m| - 1``."""
    kind = AdvectionScheme(kind)
    if kind is AdvectionScheme.ANALYTIC:
        raise ConfigurationError("magnitude error is defined for explicit/implicit schemes only")
    return _ret(np.abs(advection_multiplier(kind, gamma1, phi)) - 1.0)


def advection_phase_error(kind, gamma1, phi):
    """``|arg(m) / arg(exact)| - 1`` with principal-branch arguments.

    Raises :class:`UndefinedMetricError` where the reference phase vanishes
    (``phi = 0`` or ``gamma1*phi`` integer).
    """
    kind = AdvectionScheme(kind)
    if kind is AdvectionScheme.ANALYTIC:
        raise ConfigurationError("phase error is defined for explicit/implicit schemes only")
    g, p = _check(gamma1, phi)
    ref = np.angle(np.exp(1j * TWO_PI * g * p))
    if np.any(p == 0.0) or np.any(np.abs(ref) < 1e-12):
        raise UndefinedMetricError("reference phase is zero; phase error undefined")
    num = np.angle(advection_multiplier(kind, g, p))
    return _ret(np.abs(num / ref) - 1.0)
