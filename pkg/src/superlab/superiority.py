"""Emulator superiority ratios: per-mode, over (psi, phi) maps, and over rollouts.

``xi = err(emulator, test) / err(baseline, test)``.  The emulator is the
ansatz fitted at training mode ``psi`` on ``train_ref`` data; ``baseline_ref``
is the solver the emulator is compared against (usually the training one) and
``test_ref`` the high-fidelity reference.  ``xi < 1`` means the emulator beats
the baseline.

Undefined cells (zero denominator, degenerate fit) hold ``NaN`` and are
written as an empty CSV field.
"""
import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import fitting, spectral
from .advection import AdvectionScheme, advection_multiplier
from .diffusion import DiffusionScheme, diffusion_multiplier
from .errors import ConfigurationError, UndefinedMetricError, ValidationError
from .poisson import PoissonScheme, poisson_multiplier

SENTINEL = float("nan")
# |denominator| below ZERO_RTOL * scale counts as zero
ZERO_RTOL = 1e-12
# nRMSE values are dimensionless; a mean baseline error below this is zero
NRMSE_ZERO = 1e-15

MAP_CSV_HEADER = ("psi", "phi", "gamma", "q", "t", "metric",
                  "train_ref", "baseline_ref", "test_ref", "xi")
TRAJECTORY_CSV_HEADER = ("t", "xi", "num_err", "den_err")


class MetricKind(str, Enum):
    MAGNITUDE = "magnitude"
    PHASE = "phase"
    # |q^t - a^t| / |r^t - a^t|: the exact nRMSE ratio of a single-mode rollout
    TRAJECTORY_NRMSE = "trajectory_nrmse"


def _ratio(num, den, scale):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    zero = np.abs(den) <= ZERO_RTOL * np.maximum(scale, np.finfo(float).tiny)
    out = np.abs(num) / np.where(zero, 1.0, np.abs(den))
    out = np.where(zero | ~np.isfinite(out), np.nan, out)
    return out.item() if out.ndim == 0 else out


def multiplier_superiority(emulator_value, baseline_value, test_value, t=1,
                           metric=MetricKind.MAGNITUDE):
    """Superiority ratio of multipliers after ``t`` steps (vectorised).

    Magnitude compares ``|m|**t``; phase compares ``t*arg(m)`` so the phase
    accumulates linearly and the factor ``t`` cancels.  Returns ``NaN`` where
    the baseline and test agree under the metric.
    """
    metric = MetricKind(metric)
    t = int(t)
    if t < 1:
        raise ConfigurationError("rollout step t must be >= 1")
    q = np.asarray(emulator_value, dtype=complex)
    r = np.asarray(baseline_value, dtype=complex)
    a = np.asarray(test_value, dtype=complex)
    if metric is MetricKind.MAGNITUDE:
        qa, ra, aa = np.abs(q) ** t, np.abs(r) ** t, np.abs(a) ** t
        return _ratio(qa - aa, ra - aa, np.maximum(ra, aa))
    if metric is MetricKind.PHASE:
        pa = np.angle(a)
        num = t * np.angle(q) - t * pa
        den = t * np.angle(r) - t * pa
        return _ratio(num, den, t * np.maximum(np.abs(np.angle(r)), np.abs(pa)))
    at = a ** t
    rt = r ** t
    return _ratio(np.abs(q ** t - at), np.abs(rt - at), np.maximum(np.abs(rt), np.abs(at)))


# --------------------------------------------------------------------------
# Problems: reference multipliers plus the matching ansatz fit
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AdvectionProblem:
    gamma1: float
    name = "advection"
    schemes = AdvectionScheme

    def reference(self, kind, phi):
        return advection_multiplier(kind, self.gamma1, phi)

    def fit_multipliers(self, kind, psi, phi):
        """Emulator multiplier at every ``phi`` for each training mode ``psi``."""
        psi = np.asarray(psi, dtype=float)
        t0, t1 = fitting.advection_theta(self.reference(kind, psi), psi)
        shift = np.exp(-2j * np.pi * np.asarray(phi, dtype=float))
        return t0[:, None] * shift[None, :] + t1[:, None]

    @property
    def meta(self):
        return {"gamma": self.gamma1, "q": None}


@dataclass(frozen=True)
class DiffusionProblem:
    gamma2: float
    name = "diffusion"
    schemes = DiffusionScheme

    def reference(self, kind, phi):
        return diffusion_multiplier(kind, self.gamma2, phi)

    def fit_multipliers(self, kind, psi, phi):
        psi = np.asarray(psi, dtype=float)
        theta = fitting.diffusion_theta(self.reference(kind, psi), psi)
        lap = np.cos(2.0 * np.pi * np.asarray(phi, dtype=float)) - 1.0
        return (1.0 + theta[:, None] * lap[None, :]).astype(complex)

    @property
    def meta(self):
        return {"gamma": self.gamma2, "q": None}


@dataclass(frozen=True)
class PoissonProblem:
    q: int
    name = "poisson"
    schemes = PoissonScheme

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ConfigurationError(f"Richardson iteration count q must be an integer >= 1, got {self.q!r}")

    def reference(self, kind, phi):
        kind = PoissonScheme(kind)
        return poisson_multiplier(kind, phi, self.q if kind is PoissonScheme.RICHARDSON else None)

    def fit_multipliers(self, kind, psi, phi):
        psi = np.asarray(psi, dtype=float)
        theta = fitting.poisson_theta(self.reference(kind, psi), psi)
        base = 1.0 / (2.0 * (1.0 - np.cos(2.0 * np.pi * np.asarray(phi, dtype=float))))
        return (theta[:, None] * base[None, :]).astype(complex)

    @property
    def meta(self):
        return {"gamma": None, "q": int(self.q)}


def make_problem(name, gamma1=None, gamma2=None, q=None):
    if name == "advection":
        if gamma1 is None:
            raise ConfigurationError("advection needs gamma1")
        return AdvectionProblem(float(gamma1))
    if name == "diffusion":
        if gamma2 is None:
            raise ConfigurationError("diffusion needs gamma2")
        if not gamma2 > 0:
            raise ConfigurationError(f"gamma2 must be positive, got {gamma2}")
        return DiffusionProblem(float(gamma2))
    if name == "poisson":
        if q is None:
            raise ConfigurationError("poisson needs q")
        return PoissonProblem(int(q))
    raise ConfigurationError(f"unknown problem {name!r}")


# --------------------------------------------------------------------------
# Maps
# --------------------------------------------------------------------------

DEFAULT_GRID = np.linspace(0.01, 0.49, 49)


@dataclass(frozen=True)
class SuperiorityMap:
    psi_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.psi_grid), len(self.phi_grid)):
            raise ValidationError("map values must have shape (len(psi), len(phi))")
        finite = self.values[~np.isnan(self.values)]
        if np.any(finite < 0) or not np.all(np.isfinite(finite)):
            raise ValidationError("map values must be non-negative or NaN")

    @property
    def sentinel_mask(self):
        return np.isnan(self.values)

    def at(self, psi, phi):
        """Value at the grid cell nearest to ``(psi, phi)``."""
        i = int(np.argmin(np.abs(self.psi_grid - psi)))
        j = int(np.argmin(np.abs(self.phi_grid - phi)))
        return float(self.values[i, j])

    def rows(self):
        m = self.meta
        fmt = lambda v: "" if v is None else repr(v)
        for i, psi in enumerate(self.psi_grid):
            for j, phi in enumerate(self.phi_grid):
                xi = self.values[i, j]
                yield (repr(float(psi)), repr(float(phi)), fmt(m.get("gamma")), fmt(m.get("q")),
                       str(m["t"]), m["metric"], m["train_ref"], m["baseline_ref"], m["test_ref"],
                       "" if np.isnan(xi) else repr(float(xi)))

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MAP_CSV_HEADER)
        w.writerows(self.rows())

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def to_json_obj(self):
        vals = [[None if np.isnan(v) else float(v) for v in row] for row in self.values]
        return {"meta": dict(self.meta), "psi": [float(p) for p in self.psi_grid],
                "phi": [float(p) for p in self.phi_grid], "xi": vals}


def _grid(g, name):
    g = DEFAULT_GRID.copy() if g is None else np.atleast_1d(np.asarray(g, dtype=float))
    if g.size == 0 or not (np.all(g > 0.0) and np.all(g < 0.5)):
        raise ConfigurationError(f"{name} grid must lie inside (0, 0.5)")
    return g


def superiority_map(problem, train_ref, baseline_ref, test_ref, psi_grid=None, phi_grid=None,
                    t=1, metric=MetricKind.MAGNITUDE, threads=1):
    """Superiority ratio over every ``(psi, phi)`` cell.

    Rows (one per ``psi``) are evaluated concurrently on up to ``threads``
    workers; results are assembled in grid order, so output does not depend
    on scheduling.
    """
    kinds = problem.schemes
    train, base, test = kinds(train_ref), kinds(baseline_ref), kinds(test_ref)
    if base is test:
        raise ConfigurationError(
            f"baseline and test reference are both {base.value}: every ratio would be 0/0")
    metric = MetricKind(metric)
    if metric is MetricKind.PHASE and not isinstance(problem, AdvectionProblem):
        raise ConfigurationError("phase superiority needs complex multipliers (advection only)")
    if int(t) < 1:
        raise ConfigurationError("rollout step t must be >= 1")
    psi = _grid(psi_grid, "psi")
    phi = _grid(phi_grid, "phi")

    r = problem.reference(base, phi)
    a = problem.reference(test, phi)

    def row(p):
        q = problem.fit_multipliers(train, np.array([p]), phi)[0]
        return multiplier_superiority(q, r, a, t, metric)

    if threads and threads > 1 and len(psi) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as ex:
            values = np.array(list(ex.map(row, psi)), dtype=float)
    else:
        values = np.array([row(p) for p in psi], dtype=float)
    values = values.reshape(len(psi), len(phi))
    meta = dict(problem.meta, problem=problem.name, t=int(t), metric=metric.value,
                train_ref=train.value, baseline_ref=base.value, test_ref=test.value)
    return SuperiorityMap(psi, phi, values, meta)


# --------------------------------------------------------------------------
# Trajectory level
# --------------------------------------------------------------------------

def nrmse(pred, ref):
    """``rms(pred - ref) / rms(ref)``."""
    p = np.asarray(pred, dtype=float)
    r = np.asarray(ref, dtype=float)
    if p.shape != r.shape:
        raise ValidationError(f"shape mismatch {p.shape} vs {r.shape}")
    den = np.sqrt(np.mean(r ** 2))
    if den == 0.0:
        raise UndefinedMetricError("reference state is identically zero")
    return float(np.sqrt(np.mean((p - r) ** 2)) / den)


def _batched_nrmse(pred, ref):
    den = np.sqrt(np.mean(ref ** 2, axis=-1))
    if np.any(den == 0.0):
        raise UndefinedMetricError("a reference state is identically zero")
    return np.sqrt(np.mean((pred - ref) ** 2, axis=-1)) / den


@dataclass(frozen=True)
class TrajectorySet:
    """Stack of rollouts, shape ``(n_trajectories, S+1, N)``."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=float)
        if d.ndim == 2:
            d = d[None]
        if d.ndim != 3 or d.shape[1] < 1:
            raise ValidationError("trajectories must share N and length S+1")
        if not np.all(np.isfinite(d)):
            raise ValidationError("trajectories contain non-finite values")
        object.__setattr__(self, "data", d)

    @classmethod
    def from_list(cls, trajectories):
        arrs = [np.asarray([np.asarray(s, dtype=float) for s in tr]) for tr in trajectories]
        if len({a.shape for a in arrs}) != 1:
            raise ValidationError("trajectories must share N and length S+1")
        return cls(np.stack(arrs))

    @property
    def steps(self):
        return self.data.shape[1] - 1

    def scaled(self, factor):
        return TrajectorySet(self.data * factor)


@dataclass(frozen=True)
class TrajectorySuperiority:
    t: np.ndarray
    xi: np.ndarray
    num_err: np.ndarray
    den_err: np.ndarray

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_CSV_HEADER)
        for t, xi, n, d in zip(self.t, self.xi, self.num_err, self.den_err):
            w.writerow((int(t), "" if np.isnan(xi) else repr(float(xi)), repr(float(n)), repr(float(d))))

    def to_json_obj(self):
        return {"t": [int(v) for v in self.t],
                "xi": [None if np.isnan(v) else float(v) for v in self.xi],
                "num_err": [float(v) for v in self.num_err],
                "den_err": [float(v) for v in self.den_err]}


def trajectory_superiority(emulator, baseline, reference):
    """``xi[t] = mean nRMSE(emulator, ref) / mean nRMSE(baseline, ref)``, t = 1..S.

    The mean over initial conditions is taken before the ratio.
    """
    e, b, r = (x if isinstance(x, TrajectorySet) else TrajectorySet(x)
               for x in (emulator, baseline, reference))
    if not (e.data.shape == b.data.shape == r.data.shape):
        raise ValidationError("trajectory sets must be aligned (same count, length and N)")
    ref = r.data[:, 1:]
    num = _batched_nrmse(e.data[:, 1:], ref).mean(axis=0)
    den = _batched_nrmse(b.data[:, 1:], ref).mean(axis=0)
    xi = _ratio(num, den, np.full_like(den, NRMSE_ZERO / ZERO_RTOL))
    return TrajectorySuperiority(np.arange(1, e.steps + 1), np.atleast_1d(xi), num, den)


def linear_rollouts(ics, operator, steps):
    """Roll out linear operators from each IC.

    ``operator`` is a :class:`~superlab.spectral.Kernel3` (stepped in state
    space) or a callable ``phi -> multiplier`` (stepped spectrally; the
    imaginary part at Nyquist is dropped by the real inverse transform).
    """
    out = []
    for u in ics:
        if isinstance(operator, spectral.Kernel3):
            out.append(spectral.rollout_kernel(u, operator, steps))
        else:
            n = np.asarray(u).shape[0]
            out.append(spectral.rollout_multiplier(u, operator(spectral.relative_modes(n)), steps))
    return TrajectorySet(np.stack(out))


@dataclass(frozen=True)
class MultiModeResult:
    ansatz: fitting.AdvectionAnsatz
    xi: float


def multimode_superiority(gamma1, train_modes, test_mode, n=50, weights=None,
                          train_ref="implicit", baseline_ref="implicit", test_ref="analytic",
                          t=1, metric=MetricKind.MAGNITUDE):
    """Least-squares fit on several training modes, ratio at one test mode.

    ``weights`` are expected energies per training mode (uniform by default).
    """
    problem = AdvectionProblem(float(gamma1))
    train, base, test = (AdvectionScheme(k) for k in (train_ref, baseline_ref, test_ref))
    if base is test:
        raise ConfigurationError("baseline and test reference must differ")
    modes = tuple(int(m) for m in train_modes)
    data = (fitting.ModeDataset.uniform(modes, n) if weights is None
            else fitting.ModeDataset(modes, tuple(weights), n))
    ansatz = fitting.least_squares_fit_advection(data, lambda p: problem.reference(train, p))
    if not 0 < test_mode <= n // 2:
        raise ConfigurationError(f"test mode must lie in [1, {n // 2}]")
    phi = test_mode / n
    xi = multiplier_superiority(ansatz.multiplier(phi), problem.reference(base, phi),
                                problem.reference(test, phi), t, metric)
    return MultiModeResult(ansatz, float(xi))
