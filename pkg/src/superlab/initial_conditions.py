"""Seeded generators for sums of sines plus an optional offset.

A sample is ``offset + sum_j c_j * sin(2*pi*m_j*x - d_j)``.  Each random draw
comes from its own generator keyed on ``(seed, sample index, slot)``, where
``slot`` is the mode position (or ``-1`` for the offset), so a sample does
not depend on how many others are generated or in which order.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .spectral import GridState, _check_n


@dataclass(frozen=True)
class Constant:
    value: float

    def sample(self, rng, size):
        return np.full(size, float(self.value))

    @property
    def mean(self):
        return float(self.value)

    @property
    def var(self):
        return 0.0


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    def __post_init__(self):
        if not self.high >= self.low:
            raise ConfigurationError("Uniform law needs high >= low")

    def sample(self, rng, size):
        return rng.uniform(self.low, self.high, size)

    @property
    def mean(self):
        return 0.5 * (self.low + self.high)

    @property
    def var(self):
        return (self.high - self.low) ** 2 / 12.0


def parse_law(text):
    """``"0.5"`` -> Constant, ``"0.5:2"`` -> Uniform (used by the config file)."""
    parts = [p for p in str(text).split(":") if p != ""]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigurationError(f"cannot parse distribution {text!r}") from None
    if len(vals) == 1:
        return Constant(vals[0])
    if len(vals) == 2:
        return Uniform(*vals)
    raise ConfigurationError(f"cannot parse distribution {text!r}")


UNIFORM_PHASE = Uniform(0.0, 2.0 * np.pi)


@dataclass(frozen=True)
class ModeLaw:
    mode: int
    amplitude: object = Uniform(0.5, 2.0)
    phase: object = UNIFORM_PHASE


@dataclass(frozen=True)
class IcSpec:
    n: int
    modes: tuple = field(default_factory=tuple)
    offset: object = None
    seed: int = 0

    def __post_init__(self):
        n = _check_n(self.n)
        modes = tuple(m if isinstance(m, ModeLaw) else ModeLaw(int(m)) for m in self.modes)
        for m in modes:
            if not 1 <= m.mode <= n // 2:
                raise ConfigurationError(f"mode {m.mode} outside [1, {n // 2}]")
        if not modes and (self.offset is None or
                          (isinstance(self.offset, Constant) and self.offset.value == 0.0)):
            raise ConfigurationError("IC spec has no modes and no offset: every sample is zero")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "n", n)


def _rng(seed, index, slot):
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), index, slot + 1]))


def sample_parameters(spec, index):
    """``(amplitudes, phases, offset)`` for sample ``index``."""
    amps = np.empty(len(spec.modes))
    phases = np.empty(len(spec.modes))
    for j, law in enumerate(spec.modes):
        rng = _rng(spec.seed, index, j)
        amps[j] = law.amplitude.sample(rng, 1)[0]
        phases[j] = law.phase.sample(rng, 1)[0]
    offset = 0.0
    if spec.offset is not None:
        offset = float(spec.offset.sample(_rng(spec.seed, index, -1), 1)[0])
    return amps, phases, offset


def generate_array(spec, count, start=0):
    """``(count, N)`` array of samples ``start .. start+count-1``."""
    if count < 1:
        raise ConfigurationError("count must be positive")
    x = np.arange(spec.n) / spec.n
    out = np.empty((count, spec.n))
    for k in range(count):
        amps, phases, offset = sample_parameters(spec, start + k)
        u = np.full(spec.n, offset)
        for law, c, d in zip(spec.modes, amps, phases):
            u += c * np.sin(2.0 * np.pi * law.mode * x - d)
        out[k] = u
    return out


def generate(spec, count):
    return [GridState(u) for u in generate_array(spec, count)]


def single_mode(n, mode, amplitude=Uniform(0.5, 2.0), phase=UNIFORM_PHASE, seed=0):
    return IcSpec(n, (ModeLaw(mode, amplitude, phase),), None, seed)


def multi_mode(n, modes, amplitude=Uniform(0.5, 2.0), phase=UNIFORM_PHASE, seed=0):
    return IcSpec(n, tuple(ModeLaw(m, amplitude, phase) for m in modes), None, seed)


def burgers_family(n=60, amplitude=Constant(1.0), offset=Uniform(-0.5, 0.5), seed=0):
    """First mode with random phase plus a random mean, the Burgers IC family."""
    return IcSpec(n, (ModeLaw(1, amplitude, UNIFORM_PHASE),), offset, seed)
