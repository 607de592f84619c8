"""Periodic 1-d Poisson ``-u'' = f``: direct FD, truncated Richardson, exact.

Multipliers map the source coefficient to the solution coefficient.  The
global ``dx**2`` factor is dropped from all three (it cancels in every
relative error and superiority ratio); multiply by ``dx**2`` to get physical
solutions.

Richardson uses the largest stable pseudo-time step ``dx**2/2`` and a zero
initial guess, giving ``(0.5 - 0.5*cos(2 pi phi)**q) / (1 - cos(2 pi phi))``.
At ``phi = 0.5`` the power alternates in sign, so the ``q -> inf`` limit does
not exist there; the finite-``q`` value is still returned.
"""
from enum import Enum

import numpy as np

from .errors import ConfigurationError, DegenerateModeError


class PoissonScheme(str, Enum):
    DIRECT = "direct"
    RICHARDSON = "richardson"
    ANALYTIC = "analytic"


def int_power(x, q):
    """``x**q`` for integer ``q >= 0`` by repeated squaring (elementwise)."""
    q = int(q)
    if q < 0:
        raise ConfigurationError("power must be non-negative")
    base = np.asarray(x, dtype=float)
    result = np.ones_like(base)
    while q:
        if q & 1:
            result = result * base
        base = base * base
        q >>= 1
    return result


def _check(phi, q=None, need_q=False):
    phi = np.asarray(phi, dtype=float)
    if np.any(phi == 0.0):
        raise DegenerateModeError("mode phi = 0 is excluded by the compatibility condition")
    if np.any(phi < 0.0) or np.any(phi > 0.5):
        raise ConfigurationError("relative mode phi must lie in (0, 0.5]")
    if need_q:
        if q is None or int(q) != q or q < 1:
            raise ConfigurationError(f"Richardson iteration count q must be an integer >= 1, got {q!r}")
        q = int(q)
    return phi, q


def _ret(x):
    return x.item() if np.ndim(x) == 0 else x


def poisson_multiplier(kind, phi, q=None):
    kind = PoissonScheme(kind)
    p, q = _check(phi, q, need_q=kind is PoissonScheme.RICHARDSON)
    c = np.cos(2.0 * np.pi * p)
    if kind is PoissonScheme.ANALYTIC:
        out = 1.0 / (4.0 * np.pi ** 2 * p * p)
    elif kind is PoissonScheme.DIRECT:
        out = 1.0 / (2.0 - 2.0 * c)
    else:
        out = (0.5 - 0.5 * int_power(c, q)) / (1.0 - c)
    return _ret(out)


def poisson_error(kind, phi, q=None, baseline=PoissonScheme.ANALYTIC):
    """Relative magnitude error of ``kind`` against ``baseline`` (closed forms)."""
    kind = PoissonScheme(kind)
    baseline = PoissonScheme(baseline)
    if kind is PoissonScheme.ANALYTIC or baseline is PoissonScheme.RICHARDSON or kind is baseline:
        raise ConfigurationError(f"unsupported error pair {kind.value} vs {baseline.value}")
    p, q = _check(phi, q, need_q=kind is PoissonScheme.RICHARDSON)
    s2 = np.sin(np.pi * p) ** 2
    if kind is PoissonScheme.DIRECT:
        out = np.pi ** 2 * p * p / s2 - 1.0
    else:
        c = np.cos(2.0 * np.pi * p)
        ratio = np.abs((int_power(c, q) - 1.0) / (c - 1.0))
        if baseline is PoissonScheme.ANALYTIC:
            out = 2.0 * np.pi ** 2 * p * p * ratio - 1.0
        else:
            out = 2.0 * s2 * ratio - 1.0
    return _ret(out)


def poisson_error_numeric(kind, phi, q=None, baseline=PoissonScheme.ANALYTIC):
    kind = PoissonScheme(kind)
    baseline = PoissonScheme(baseline)
    if kind is PoissonScheme.ANALYTIC or baseline is PoissonScheme.RICHARDSON or kind is baseline:
        raise ConfigurationError(f"unsupported error pair {kind.value} vs {baseline.value}")
    b = np.abs(poisson_multiplier(baseline, phi))
    return _ret((np.abs(poisson_multiplier(kind, phi, q)) - b) / b)
