"""Real DFT, periodic 3-tap cross-correlation and the kernel/multiplier link.

Conventions
-----------
* Grid: ``x_i = i/N`` on the periodic unit interval, ``N`` even and >= 4.
* Forward transform is unnormalised,
  ``coeffs[m] = sum_i u_i exp(-2j*pi*m*i/N)``; the inverse carries ``1/N``.
* Kernel taps are ``[k_minus1, k_0, k_plus1]`` with
  ``(k * u)_i = k_minus1*u_{i-1} + k_0*u_i + k_plus1*u_{i+1}``.  Under this
  convention the tap ``k_minus1`` contributes ``k_minus1*exp(-2j*pi*phi)`` to
  the multiplier, so the linear advection ansatz with kernel
  ``[theta0, theta1, 0]`` has multiplier ``theta0*exp(-2j*pi*phi) + theta1``.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, ValidationError

# Relative tolerance for the zero-imaginary-part condition on modes 0 and N/2.
REALITY_RTOL = 1e-9


def _check_n(n):
    if int(n) != n or n < 4 or n % 2:
        raise ConfigurationError(f"grid resolution must be an even integer >= 4, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class GridState:
    """Nodal values of a periodic field at ``x_i = i/N``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("GridState values must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValidationError("GridState values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def x(self):
        return np.arange(self.n) / self.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class SpectralState:
    """Real-FFT coefficients (length ``N//2 + 1``) of a length-``N`` state."""

    coeffs: np.ndarray
    n: int

    def __post_init__(self):
        n = _check_n(self.n)
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (n // 2 + 1,):
            raise ValidationError(
                f"expected {n // 2 + 1} coefficients for N={n}, got shape {c.shape}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "n", n)

    def reality_defect(self):
        """Largest imaginary part at modes 0 and N/2, relative to the spectrum scale."""
        scale = max(float(np.max(np.abs(self.coeffs))), 1.0)
        return max(abs(self.coeffs[0].imag), abs(self.coeffs[-1].imag)) / scale


@dataclass(frozen=True)
class Kernel3:
    """Three-tap stencil ``[k_minus1, k_0, k_plus1]``."""

    minus: float
    center: float
    plus: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.minus, self.center, self.plus])):
            raise ValidationError("kernel taps must be finite")

    @classmethod
    def from_taps(cls, taps):
        km, k0, kp = (float(t) for t in taps)
        return cls(km, k0, kp)

    @property
    def taps(self):
        return np.array([self.minus, self.center, self.plus], dtype=float)


def _values(state):
    if isinstance(state, GridState):
        return state.values
    return GridState(state).values


def relative_modes(n):
    """``phi_m = m/N`` for ``m = 0 .. N/2``."""
    n = _check_n(n)
    return np.arange(n // 2 + 1) / n


def rfft(state):
    """Unnormalised real DFT of a :class:`GridState` (or array)."""
    u = _values(state)
    n = _check_n(u.shape[0])
    return SpectralState(np.fft.rfft(u), n)


def irfft(spec):
    """Inverse of :func:`rfft`, including the ``1/N`` factor."""
    if spec.reality_defect() > REALITY_RTOL:
        raise ValidationError(
            "spectrum violates the reality condition at mode 0 or N/2 "
            f"(relative imaginary part {spec.reality_defect():.3e})")
    return GridState(np.fft.irfft(spec.coeffs, spec.n))


def circular_cross_correlate(kernel, state):
    u = _values(state)
    return GridState(kernels.correlate3(kernel.taps, np.ascontiguousarray(u)))


def kernel_to_multiplier(kernel, n):
    """Fourier multiplier of a 3-tap kernel at every real-FFT mode."""
    w = np.exp(-2j * np.pi * relative_modes(n))
    return kernel.minus * w + kernel.center + kernel.plus * np.conj(w)


def apply_multiplier(spec, multiplier):
    m = np.asarray(multiplier, dtype=complex)
    if m.shape != spec.coeffs.shape:
        raise ValidationError(
            f"multiplier length {m.shape} does not match spectrum length {spec.coeffs.shape}")
    return SpectralState(spec.coeffs * m, spec.n)


def parseval_energy(spec):
    """``sum_i u_i**2`` recovered from the half spectrum.

    Interior modes stand for a conjugate pair and are counted twice.
    """
    c2 = np.abs(spec.coeffs) ** 2
    weights = np.full(c2.shape, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    return float(np.sum(weights * c2) / spec.n)


def step_multiplier(state, multiplier):
    """One spectral step ``irfft(multiplier * rfft(u))`` in state space."""
    return irfft(apply_multiplier(rfft(state), multiplier))


def rollout_multiplier(state, multiplier, steps):
    """Trajectory ``(steps+1, N)`` of repeated multiplier steps.

    Uses ``multiplier**t`` per snapshot rather than iterating, so long horizons
    do not accumulate transform round-off.
    """
    u = _values(state)
    n = _check_n(u.shape[0])
    m = np.asarray(multiplier, dtype=complex)
    c0 = np.fft.rfft(u)
    t = np.arange(steps + 1)[:, None]
    return np.fft.irfft(c0[None, :] * m[None, :] ** t, n, axis=1)


def rollout_kernel(state, kernel, steps):
    """Trajectory ``(steps+1, N)`` of repeated state-space correlations."""
    u = np.ascontiguousarray(_values(state))
    return kernels.rollout3(kernel.taps, u, int(steps))
