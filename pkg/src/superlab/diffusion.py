"""Linear diffusion: FTCS, BTCS and the exact heat-kernel multiplier.

``gamma2 = 2*nu*N**2*dt > 0``.  All multipliers are real because the
central stencil introduces no phase error.
"""
from enum import Enum

import numpy as np

from .errors import ConfigurationError


class DiffusionScheme(str, Enum):
    FTCS = "ftcs"
    BTCS = "btcs"
    ANALYTIC = "analytic"


def _check(gamma2, phi):
    gamma2 = float(gamma2)
    if not gamma2 > 0.0:
        raise ConfigurationError(f"gamma2 must be positive, got {gamma2}")
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0.0) or np.any(phi > 0.5):
        raise ConfigurationError("relative mode phi must lie in [0, 0.5]")
    return gamma2, phi


def _ret(x):
    return x.item() if np.ndim(x) == 0 else x


def diffusion_multiplier(kind, gamma2, phi):
    kind = DiffusionScheme(kind)
    g, p = _check(gamma2, phi)
    lap = np.cos(2.0 * np.pi * p) - 1.0
    if kind is DiffusionScheme.FTCS:
        out = 1.0 + g * lap
    elif kind is DiffusionScheme.BTCS:
        out = 1.0 / (1.0 - g * lap)
    else:
        out = np.exp(-2.0 * np.pi ** 2 * g * p * p)
    return _ret(out)


def diffusion_magnitude_error(kind, gamma2, phi):
    """Relative magnitude error ``(|m| - a)/a`` against the exact multiplier ``a``.

    Closed forms; the FTCS one takes ``|.|`` of the multiplier so an
    over-damped negative amplification reports its amplitude.
    """
    kind = DiffusionScheme(kind)
    g, p = _check(gamma2, phi)
    growth = np.exp(2.0 * np.pi ** 2 * g * p * p)
    s2 = np.sin(np.pi * p) ** 2
    if kind is DiffusionScheme.FTCS:
        out = np.abs(g * (np.cos(2.0 * np.pi * p) - 1.0) + 1.0) * growth - 1.0
    elif kind is DiffusionScheme.BTCS:
        out = (-2.0 * g * s2 + growth - 1.0) / (2.0 * g * s2 + 1.0)
    else:
        raise ConfigurationError("magnitude error is defined for FTCS/BTCS only")
    return _ret(out)


def diffusion_magnitude_error_numeric(kind, gamma2, phi):
    kind = DiffusionScheme(kind)
    if kind is DiffusionScheme.ANALYTIC:
        raise ConfigurationError("magnitude error is defined for FTCS/BTCS only")
    a = diffusion_multiplier(DiffusionScheme.ANALYTIC, gamma2, phi)
    return _ret((np.abs(diffusion_multiplier(kind, gamma2, phi)) - a) / a)
