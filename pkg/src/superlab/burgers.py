"""Implicit first-order upwind Burgers solver with Picard linearisation.

Non-conservative viscous Burgers ``u_t + u u_x = nu u_xx`` on the periodic unit
interval, backward Euler in time.  Each time step solves the nonlinear system

    (I + dt*Gamma(u') - dt*nu*L) u' = u

by Picard iteration: the upwind matrix ``Gamma`` is re-assembled around the
latest iterate while the right-hand side stays the previous state.  ``P1``
stops after one cycle (linearised around the previous state), ``TRUNCATED``
after exactly ``k`` cycles, and ``CONVERGED`` once the max-norm nonlinear
residual drops below ``picard_tolerance``.

Upwind gating
-------------
``Gamma(w) = diag(max(wb, 0)) B + diag(min(wf, 0)) F`` with
``wb_i = (w_{i+1} + w_i)/2`` and ``wf_i = (w_{i-1} + w_i)/2``.  Negative
winds therefore select the forward difference with their own (negative)
coefficient.  Setting ``literal_upwind=True`` uses ``max(wf, 0)`` for the
forward term instead, i.e. drops negative winds entirely; it exists only for
side-by-side comparison and does not upwind ``u u_x`` correctly.
"""
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import kernels
from .errors import ConfigurationError
from .linalg import lu_solve
from .spectral import GridState

# Assumed translation of the benchmark difficulty settings (diffusion 0.2,
# convection magnitude 8) to physical parameters at N = 60 and unit wind.
REGIME_DIFFUSION_GAMMA = 0.2
REGIME_CONVECTION_MAGNITUDE = 8.0

# Shock-forming preset: the smooth phase spans several steps so the Picard
# count visibly rises, peaks at shock formation and decays afterwards.
SHOCK_DT = 0.02
SHOCK_DIFFUSION_GAMMA = 0.05
SHOCK_OFFSET = 0.3


class PicardMode(str, Enum):
    P1 = "p1"
    TRUNCATED = "truncated"
    CONVERGED = "converged"


@dataclass(frozen=True)
class BurgersConfig:
    n: int = 60
    dt: float = REGIME_CONVECTION_MAGNITUDE / 60
    nu: float = REGIME_DIFFUSION_GAMMA / (2 * 60 ** 2 * (REGIME_CONVECTION_MAGNITUDE / 60))
    picard_tolerance: float = 1e-5
    max_picard_iters: int = 100
    mode: PicardMode = PicardMode.CONVERGED
    truncate_after: int = 1
    literal_upwind: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", PicardMode(self.mode))
        if int(self.n) != self.n or self.n < 8:
            raise ConfigurationError(f"Burgers grid needs n >= 8, got {self.n}")
        if not self.dt > 0.0:
            raise ConfigurationError("dt must be positive")
        if not self.nu >= 0.0:
            raise ConfigurationError("nu must be non-negative")
        if not self.picard_tolerance > 0.0:
            raise ConfigurationError("picard_tolerance must be positive")
        if self.max_picard_iters < 1:
            raise ConfigurationError("max_picard_iters must be >= 1")
        if self.mode is PicardMode.TRUNCATED and self.truncate_after < 1:
            raise ConfigurationError("truncate_after must be >= 1")

    @classmethod
    def paper_regime(cls, n=60, u_scale=1.0, **kw):
        """Preset with ``2 nu N^2 dt = 0.2`` and ``u_scale*N*dt = 8`` (assumed mapping)."""
        dt = REGIME_CONVECTION_MAGNITUDE / (u_scale * n)
        nu = REGIME_DIFFUSION_GAMMA / (2.0 * n * n * dt)
        return cls(n=n, dt=dt, nu=nu, **kw)

    @classmethod
    def shock_forming(cls, n=60, **kw):
        """``dt = 0.02`` and ``2 nu N^2 dt = 0.05``; pair with :func:`shock_forming_ic`."""
        return cls(n=n, dt=SHOCK_DT, nu=SHOCK_DIFFUSION_GAMMA / (2.0 * n * n * SHOCK_DT), **kw)

    def with_mode(self, mode, truncate_after=None):
        kw = {"mode": PicardMode(mode)}
        if truncate_after is not None:
            kw["truncate_after"] = int(truncate_after)
        return replace(self, **kw)

    @property
    def diffusion_gamma(self):
        return 2.0 * self.nu * self.n ** 2 * self.dt

    def convection_number(self, u_scale=1.0):
        return u_scale * self.n * self.dt


@dataclass(frozen=True)
class OperatorMatrices:
    laplacian: np.ndarray
    forward: np.ndarray
    backward: np.ndarray
    dx: float

    @property
    def n(self):
        return self.laplacian.shape[0]


@dataclass(frozen=True)
class BurgersStepReport:
    new_state: GridState
    picard_iterations: int
    final_residual: float
    converged: bool


@dataclass(frozen=True)
class PicardRecord:
    step: int
    picard_iterations: int
    residual: float
    one_step_nrmse: float


def shock_forming_ic(n=60, phase=0.0, offset=SHOCK_OFFSET):
    """``offset + sin(2 pi x - phase)``; the offset makes the shock travel."""
    x = np.arange(n) / n
    return GridState(offset + np.sin(2.0 * np.pi * x - phase))


def build_operator_matrices(n, dx=None):
    """Periodic second-difference, forward- and backward-difference matrices."""
    if n < 3:
        raise ConfigurationError("need at least 3 nodes")
    dx = 1.0 / n if dx is None else float(dx)
    eye = np.eye(n)
    to_prev = np.roll(eye, -1, axis=1)  # (to_prev @ u)_i = u_{i-1}
    to_next = np.roll(eye, 1, axis=1)   # (to_next @ u)_i = u_{i+1}
    lap = (to_prev - 2.0 * eye + to_next) / dx ** 2
    fwd = (to_next - eye) / dx
    bwd = (eye - to_prev) / dx
    return OperatorMatrices(lap, fwd, bwd, dx)


def _vals(state):
    return state.values if isinstance(state, GridState) else GridState(state).values


def upwind_matrix(winds, ops, literal=False):
    w = np.ascontiguousarray(_vals(winds))
    if w.shape[0] != ops.n:
        raise ConfigurationError("winds length does not match operator size")
    return kernels.upwind_matrix(w, 1.0 / ops.dx, bool(literal))


def assemble_system(linearization_state, cfg, ops):
    """``I + dt*Gamma(w) - dt*nu*L`` linearised around ``w``."""
    gamma = upwind_matrix(linearization_state, ops, cfg.literal_upwind)
    return np.eye(ops.n) + cfg.dt * gamma - (cfg.dt * cfg.nu) * ops.laplacian


def nonlinear_residual(candidate, previous, cfg, ops):
    """``max |Lambda(u) u - u_prev|`` for a candidate next state ``u``."""
    u = _vals(candidate)
    return float(np.max(np.abs(assemble_system(u, cfg, ops) @ u - _vals(previous))))


def linear_step(state, winds, cfg, ops=None):
    """One solve with the system matrix linearised around fixed ``winds``."""
    ops = ops or build_operator_matrices(cfg.n)
    return GridState(lu_solve(assemble_system(winds, cfg, ops), _vals(state)))


def step(state, cfg, ops=None):
    u_prev = _vals(state)
    if u_prev.shape[0] != cfg.n:
        raise ConfigurationError(f"state has {u_prev.shape[0]} nodes, config expects {cfg.n}")
    ops = ops or build_operator_matrices(cfg.n)
    if cfg.mode is PicardMode.P1:
        budget = 1
    elif cfg.mode is PicardMode.TRUNCATED:
        budget = cfg.truncate_after
    else:
        budget = cfg.max_picard_iters

    u = u_prev
    a = assemble_system(u, cfg, ops)
    residual = np.inf
    k = 0
    while k < budget:
        u = lu_solve(a, u_prev)
        k += 1
        a = assemble_system(u, cfg, ops)
        residual = float(np.max(np.abs(a @ u - u_prev)))
        if cfg.mode is PicardMode.CONVERGED and residual < cfg.picard_tolerance:
            break
    return BurgersStepReport(GridState(u), k, residual, residual < cfg.picard_tolerance)


def rollout(ic, cfg, steps, return_reports=False):
    """Trajectory of shape ``(steps+1, N)``; optionally also the step reports."""
    ops = build_operator_matrices(cfg.n)
    u = GridState(_vals(ic))
    traj = np.empty((steps + 1, cfg.n))
    traj[0] = u.values
    reports = []
    for t in range(steps):
        rep = step(u, cfg, ops)
        reports.append(rep)
        u = rep.new_state
        traj[t + 1] = u.values
    return (traj, reports) if return_reports else traj


def _nrmse_or_zero(pred, ref):
    den = np.sqrt(np.mean(ref ** 2))
    num = np.sqrt(np.mean((pred - ref) ** 2))
    if den == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return float(num / den)


def picard_diagnostics(ic, cfg, steps):
    """Per transition of the converged trajectory: Picard count, residual and
    the nRMSE of a P1 step against the converged step from the same state."""
    ops = build_operator_matrices(cfg.n)
    conv_cfg = cfg.with_mode(PicardMode.CONVERGED)
    p1_cfg = cfg.with_mode(PicardMode.P1)
    u = GridState(_vals(ic))
    records = []
    for t in range(steps):
        conv = step(u, conv_cfg, ops)
        p1 = step(u, p1_cfg, ops)
        records.append(PicardRecord(t, conv.picard_iterations, conv.final_residual,
                                    _nrmse_or_zero(p1.new_state.values, conv.new_state.values)))
        u = conv.new_state
    return records
