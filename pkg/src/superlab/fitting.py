"""Linear emulator ansatzes and their fits to a reference scheme.

Three ansatzes, one per PDE:

* advection: kernel ``[theta0, theta1, 0]``, multiplier
  ``theta0*exp(-2j*pi*phi) + theta1``;
* diffusion: ``1 + theta*(cos(2*pi*phi) - 1)`` (FTCS with a free ``gamma2``);
* Poisson: ``theta / (2*(1 - cos(2*pi*phi)))`` (direct FD with a free scale).

Informed at a single mode ``psi`` the one-step MSE collapses to
``|q(psi) - r(psi)|**2`` times the expected mode energy, so the fit is the
exact solution of ``q(psi) = r(psi)`` for any amplitude/phase distribution.
With several modes it becomes an energy-weighted least-squares problem.
"""
from dataclasses import dataclass

import numpy as np

from . import spectral
from .advection import AdvectionScheme, advection_multiplier
from .diffusion import DiffusionScheme
from .errors import ConfigurationError, DegenerateModeError, ValidationError
from .poisson import PoissonScheme, int_power

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AdvectionAnsatz:
    theta0: float
    theta1: float

    def __post_init__(self):
        if not (np.isfinite(self.theta0) and np.isfinite(self.theta1)):
            raise ValidationError("ansatz parameters must be finite")

    def multiplier(self, phi):
        return self.theta0 * np.exp(-1j * TWO_PI * np.asarray(phi, dtype=float)) + self.theta1

    @property
    def kernel(self):
        return spectral.Kernel3(self.theta0, self.theta1, 0.0)

    @property
    def theta(self):
        return np.array([self.theta0, self.theta1])


@dataclass(frozen=True)
class DiffusionAnsatz:
    theta: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise ValidationError("ansatz parameter must be finite")

    def multiplier(self, phi):
        return 1.0 + self.theta * (np.cos(TWO_PI * np.asarray(phi, dtype=float)) - 1.0)

    @property
    def kernel(self):
        return spectral.Kernel3(self.theta / 2.0, 1.0 - self.theta, self.theta / 2.0)


@dataclass(frozen=True)
class PoissonAnsatz:
    theta: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise ValidationError("ansatz parameter must be finite")

    def multiplier(self, phi):
        phi = np.asarray(phi, dtype=float)
        if np.any(phi == 0.0):
            raise DegenerateModeError("Poisson ansatz is singular at phi = 0")
        return self.theta / (2.0 * (1.0 - np.cos(TWO_PI * phi)))


# --------------------------------------------------------------------------
# Single-mode fits
# --------------------------------------------------------------------------

def advection_theta(reference_value, psi):
    """Vectorised ``(theta0, theta1)`` solving ``q(psi) = r``; NaN where degenerate."""
    r = np.asarray(reference_value, dtype=complex)
    psi = np.asarray(psi, dtype=float)
    s = np.sin(TWO_PI * psi)
    bad = np.abs(s) < 1e-12
    s_safe = np.where(bad, 1.0, s)
    theta0 = -r.imag / s_safe
    theta1 = r.real - theta0 * np.cos(TWO_PI * psi)
    theta0 = np.where(bad, np.nan, theta0)
    theta1 = np.where(bad, np.nan, theta1)
    return theta0, theta1


def fit_advection_ansatz(reference_value, psi):
    """Fit the two-parameter advection ansatz at training mode ``psi``."""
    if not 0.0 < psi < 0.5:
        raise DegenerateModeError(f"advection fit is rank-deficient at psi = {psi}")
    t0, t1 = advection_theta(reference_value, psi)
    if not np.isfinite(t0):
        raise DegenerateModeError(f"advection fit is rank-deficient at psi = {psi}")
    return AdvectionAnsatz(float(t0), float(t1))


def advection_fit_closed_form(kind, gamma1, psi):
    """Textbook expressions for the fitted parameters against each reference."""
    kind = AdvectionScheme(kind)
    g = float(gamma1)
    if kind is AdvectionScheme.EXPLICIT:
        return AdvectionAnsatz(-g, g + 1.0)
    s = np.sin(TWO_PI * psi)
    if abs(s) < 1e-12:
        raise DegenerateModeError(f"advection fit is rank-deficient at psi = {psi}")
    if kind is AdvectionScheme.IMPLICIT:
        s2 = np.sin(np.pi * psi) ** 2
        d = 4.0 * g * g * s2 - 4.0 * g * s2 + 1.0
        return AdvectionAnsatz(-g / d, (-4.0 * g * s2 + g + 1.0) / d)
    return AdvectionAnsatz(-np.sin(TWO_PI * g * psi) / s, np.sin(TWO_PI * psi * (g + 1.0)) / s)


def diffusion_theta(reference_value, psi):
    r = np.asarray(reference_value, dtype=float)
    lap = np.cos(TWO_PI * np.asarray(psi, dtype=float)) - 1.0
    bad = np.abs(lap) < 1e-14
    return np.where(bad, np.nan, (r - 1.0) / np.where(bad, 1.0, lap))


def fit_diffusion_ansatz(reference_value, psi):
    if psi == 0.0:
        raise DegenerateModeError("diffusion fit is undefined at psi = 0")
    return DiffusionAnsatz(float(diffusion_theta(reference_value, psi)))


def diffusion_fit_closed_form(kind, gamma2, psi):
    kind = DiffusionScheme(kind)
    g = float(gamma2)
    if kind is DiffusionScheme.FTCS:
        return DiffusionAnsatz(g)
    if psi == 0.0:
        raise DegenerateModeError("diffusion fit is undefined at psi = 0")
    if kind is DiffusionScheme.BTCS:
        return DiffusionAnsatz(g / (2.0 * g * np.sin(np.pi * psi) ** 2 + 1.0))
    x = 2.0 * np.pi ** 2 * g * psi ** 2
    return DiffusionAnsatz((1.0 - np.exp(x)) * np.exp(-x) / (np.cos(TWO_PI * psi) - 1.0))


def poisson_theta(reference_value, psi):
    return np.asarray(reference_value, dtype=float) * 2.0 * (1.0 - np.cos(TWO_PI * np.asarray(psi, dtype=float)))


def fit_poisson_ansatz(psi, q=None, reference_value=None):
    """Fit the Poisson ansatz at ``psi``.

    Pass ``q`` to fit the Richardson(q) reference with the closed form
    ``1 - cos(2 pi psi)**q``, or ``reference_value`` for any other reference.
    """
    if psi == 0.0:
        raise DegenerateModeError("Poisson fit is undefined at psi = 0")
    if (q is None) == (reference_value is None):
        raise ConfigurationError("give exactly one of q or reference_value")
    if q is not None:
        return PoissonAnsatz(float(1.0 - int_power(np.cos(TWO_PI * psi), q)))
    return PoissonAnsatz(float(poisson_theta(reference_value, psi)))


def poisson_fit_closed_form(kind, psi, q=None):
    kind = PoissonScheme(kind)
    if kind is PoissonScheme.RICHARDSON:
        return fit_poisson_ansatz(psi, q=q)
    if kind is PoissonScheme.DIRECT:
        return PoissonAnsatz(1.0)
    return PoissonAnsatz(float(np.sin(np.pi * psi) ** 2 / (np.pi * psi) ** 2))


# --------------------------------------------------------------------------
# Multi-mode least squares
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeDataset:
    """Expected energies ``E|u_m|^2`` of the training data per active mode."""

    modes: tuple
    weights: tuple
    n: int

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        weights = tuple(float(w) for w in self.weights)
        if len(modes) != len(weights) or not modes:
            raise ValidationError("modes and weights must be non-empty and of equal length")
        if any(m < 1 or m > self.n // 2 for m in modes):
            raise ValidationError(f"modes must lie in [1, {self.n // 2}]")
        if any(w < 0.0 or not np.isfinite(w) for w in weights) or max(weights) <= 0.0:
            raise ValidationError("weights must be finite, non-negative, with at least one positive")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, modes, n):
        return cls(tuple(modes), (1.0,) * len(modes), n)

    @property
    def phi(self):
        return np.asarray(self.modes, dtype=float) / self.n

    @property
    def w(self):
        return np.asarray(self.weights, dtype=float)


def least_squares_fit_advection(dataset, reference):
    """Weighted least-squares fit of the advection ansatz.

    ``reference`` maps relative modes to the reference multiplier.  The 2x2
    real normal equations come from splitting each complex residual
    ``theta0*exp(-2j pi phi) + theta1 - r`` into real and imaginary rows.
    """
    phi = dataset.phi
    w = dataset.w
    r = np.asarray(reference(phi), dtype=complex)
    c = np.cos(TWO_PI * phi)
    s = np.sin(TWO_PI * phi)
    sw = w.sum()
    swc = np.sum(w * c)
    # rows (c, 1) for the real part and (-s, 0) for the imaginary part
    rhs0 = np.sum(w * (c * r.real - s * r.imag))
    rhs1 = np.sum(w * r.real)
    det = sw * sw - swc * swc
    if det <= 1e-13 * sw * sw:
        raise DegenerateModeError("normal matrix is rank-deficient (all active modes at psi in {0, 0.5})")
    theta0 = (sw * rhs0 - swc * rhs1) / det
    theta1 = (sw * rhs1 - swc * rhs0) / det
    return AdvectionAnsatz(float(theta0), float(theta1))


def sampled_least_squares_oracle(rng_seed, mode, n, amplitude, phase, reference, n_samples):
    """Fit ``[theta0, theta1, 0]`` by minimising the empirical one-step MSE.

    States ``c*sin(2 pi mode x - d)`` are drawn with ``c ~ amplitude`` and
    ``d ~ phase`` (laws from :mod:`superlab.initial_conditions`), stepped by
    the reference multiplier in Fourier space, and the kernel is fitted by
    ordinary least squares in state space.  No closed form is involved.
    """
    if n_samples < 2:
        raise ConfigurationError("need at least two samples")
    rng = np.random.default_rng(rng_seed)
    x = np.arange(n) / n
    amps = amplitude.sample(rng, n_samples)
    phases = phase.sample(rng, n_samples)
    states = amps[:, None] * np.sin(TWO_PI * mode * x[None, :] - phases[:, None])
    if not np.any(states):
        raise DegenerateModeError("all sampled states are zero")
    mult = np.asarray(reference(spectral.relative_modes(n)), dtype=complex)
    targets = np.fft.irfft(np.fft.rfft(states, axis=1) * mult[None, :], n, axis=1)
    design = np.stack([np.roll(states, 1, axis=1).ravel(), states.ravel()], axis=1)
    theta, *_ = np.linalg.lstsq(design, targets.ravel(), rcond=None)
    return AdvectionAnsatz(float(theta[0]), float(theta[1]))


def supervised_vs_residual_losses(ansatz, dataset, a_multiplier, b_multiplier):
    """One-step supervised and discrete-residual losses in Fourier space.

    The solver is ``A u' = B u`` with multipliers ``a`` and ``b``; the
    reference is ``b/a``.  Both losses use the same ``1/N**2`` normalisation
    and the dataset energies as weights.
    """
    phi = dataset.phi
    a = np.asarray(a_multiplier(phi), dtype=complex) * np.ones_like(phi)
    b = np.asarray(b_multiplier(phi), dtype=complex) * np.ones_like(phi)
    active = dataset.w > 0.0
    if np.any(np.abs(a[active]) == 0.0):
        raise DegenerateModeError("implicit operator is singular at an active mode")
    diff2 = np.abs(ansatz.multiplier(phi) - b / a) ** 2
    norm = dataset.n ** 2
    l_sup = float(np.sum(dataset.w * diff2) / norm)
    l_res = float(np.sum(dataset.w * np.abs(a) ** 2 * diff2) / norm)
    return l_sup, l_res


def advection_operator_pair(kind, gamma1):
    """``(a, b)`` multiplier callables with ``a u' = b u`` for an upwind scheme."""
    kind = AdvectionScheme(kind)
    g = float(gamma1)
    if kind is AdvectionScheme.EXPLICIT:
        return (lambda phi: np.ones_like(np.asarray(phi, dtype=float), dtype=complex),
                lambda phi: advection_multiplier(kind, g, phi))
    if kind is AdvectionScheme.IMPLICIT:
        return (lambda phi: 1.0 - g + g * np.exp(-1j * TWO_PI * np.asarray(phi, dtype=float)),
                lambda phi: np.ones_like(np.asarray(phi, dtype=float), dtype=complex))
    raise ConfigurationError("the analytic scheme has no finite-difference operator pair")
