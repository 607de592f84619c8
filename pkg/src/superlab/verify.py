"""Acceptance checks shared by ``superlab verify`` and the test suite.

Each check returns ``(passed, detail)``; :func:`run_all` wraps them into
:class:`CheckResult` records.  A check that raises counts as failed.
"""
from dataclasses import dataclass

import numpy as np

from . import advection, burgers, diffusion, fitting, initial_conditions, poisson, spectral
from .superiority import (AdvectionProblem, DiffusionProblem, PoissonProblem, multimode_superiority,
                          multiplier_superiority, superiority_map)

PHI_101 = np.linspace(0.0, 0.5, 101)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str


def _fmt(x):
    return f"{x:.3e}"


def check_exact_transport():
    g = -1.0
    e = advection.advection_multiplier("explicit", g, PHI_101)
    a = advection.advection_multiplier("analytic", g, PHI_101)
    diff = float(np.max(np.abs(e - a)))
    mag = float(np.max(np.abs(advection.advection_magnitude_error("explicit", g, PHI_101))))
    inner = PHI_101[(PHI_101 > 0) & (PHI_101 < 0.5)]
    ph = float(np.max(np.abs(advection.advection_phase_error("explicit", g, inner))))
    ok = diff <= 1e-14 and mag <= 1e-14 and ph <= 1e-14
    return ok, f"max|e-a|={_fmt(diff)} max|mag err|={_fmt(mag)} max|phase err|={_fmt(ph)}"


def check_closed_form_values():
    a = advection.advection_magnitude_error("implicit", -1.0, 0.5)
    b = diffusion.diffusion_multiplier("btcs", 1.0, 0.5)
    c = poisson.poisson_error("direct", 0.25)
    ea, eb, ec = abs(a + 2 / 3), abs(b - 1 / 3), abs(c - (np.pi ** 2 / 8 - 1))
    ok = ea <= 1e-12 and eb <= 1e-12 and ec <= 1e-10
    return ok, f"implicit mag={a:.15f} btcs={b:.15f} direct-vs-analytic={c:.12f}"


def check_fit_oracle(n_cases=100, seed=20240611, n=160, n_samples=24):
    rng = np.random.default_rng(seed)
    laws = [
        (initial_conditions.Uniform(0.5, 2.0), initial_conditions.UNIFORM_PHASE),
        (initial_conditions.Constant(1.0), initial_conditions.Constant(0.0)),
        (initial_conditions.Uniform(0.05, 5.0), initial_conditions.Uniform(0.0, 0.5 * np.pi)),
    ]
    worst = 0.0
    for case in range(n_cases):
        g = float(rng.uniform(-5.0, -0.1))
        m = int(rng.integers(3, n // 2 - 2))
        psi = m / n
        for kind in advection.AdvectionScheme:
            closed = fitting.advection_fit_closed_form(kind, g, psi).theta
            ref = lambda p, k=kind: advection.advection_multiplier(k, g, p)
            for j, (amp, phase) in enumerate(laws):
                est = fitting.sampled_least_squares_oracle(
                    [seed, case, j], m, n, amp, phase, ref, n_samples).theta
                rel = np.linalg.norm(est - closed) / max(np.linalg.norm(closed), 1e-300)
                worst = max(worst, float(rel))
    return worst <= 1e-8, f"worst relative theta mismatch {_fmt(worst)} over {n_cases}x3x3 fits"


def check_self_relearn():
    worst = 0.0
    undefined = 0
    for g in (-0.5, -3.0):
        m = superiority_map(AdvectionProblem(g), "explicit", "explicit", "analytic")
        worst = max(worst, float(np.nanmax(np.abs(m.values - 1.0))))
        undefined += int(m.sentinel_mask.sum())
    for g in (0.5, 3.0):
        m = superiority_map(DiffusionProblem(g), "ftcs", "ftcs", "analytic")
        worst = max(worst, float(np.nanmax(np.abs(m.values - 1.0))))
        undefined += int(m.sentinel_mask.sum())
    return worst <= 1e-10 and undefined == 0, f"max|xi-1|={_fmt(worst)} undefined cells={undefined}"


def check_forward_advection():
    m = superiority_map(AdvectionProblem(-3.0), "implicit", "implicit", "analytic",
                        [0.1], [0.1, 0.2, 0.3, 0.4])
    v = m.values[0]
    ok = abs(v[0] - 1.0) <= 1e-10 and np.all(v[1:] < 0.9) and abs(v[2] - 0.482) <= 1e-3
    return bool(ok), "xi(psi=0.1, phi=0.1..0.4) = " + ", ".join(f"{x:.5f}" for x in v)


def check_forward_diffusion():
    parts = []
    ok = True
    for g in (1.0, 3.0):
        xi = superiority_map(DiffusionProblem(g), "btcs", "btcs", "analytic", [0.1], [0.3]).values[0, 0]
        psis = np.array([0.3, 0.1, 1e-2, 1e-3, 1e-4])
        theta = np.array([fitting.diffusion_fit_closed_form("btcs", g, p).theta for p in psis])
        below = bool(np.all(theta < g))
        approach = bool(np.all(np.diff(theta) > 0) and abs(theta[-1] - g) <= 1e-5 * g)
        ok &= bool(xi < 1.0) and below and approach
        parts.append(f"gamma2={g:g}: xi(0.1,0.3)={xi:.4f} theta<gamma2={below} theta->gamma2={approach}")
    return ok, "; ".join(parts)


def check_backward_poisson():
    m = superiority_map(PoissonProblem(5), "richardson", "richardson", "analytic", [0.4, 0.1], [0.1, 0.4])
    low = m.values[0, 0]   # psi=0.4, phi=0.1
    high = m.values[1, 1]  # psi=0.1, phi=0.4
    ok = bool(low < 1.0 and high >= 1.0)
    return ok, f"xi(psi=0.4, phi=0.1)={low:.4f} (want <1), xi(psi=0.1, phi=0.4)={high:.4f} (want >=1)"


def check_richardson():
    d = abs(poisson.poisson_multiplier("richardson", 0.3, 10_000) - poisson.poisson_multiplier("direct", 0.3))
    phis = np.linspace(0.005, 0.5, 100)
    q1 = poisson.poisson_multiplier("richardson", phis, 1)
    exact = bool(np.all(q1 == 0.5))
    return d < 1e-6 and exact, f"|R(1e4)-D| at 0.3 = {_fmt(d)}; R(q=1)==0.5 on 100 modes: {exact}"


def check_multistep():
    prob = AdvectionProblem(-0.9)
    q = prob.fit_multipliers("implicit", np.array([0.1]), np.array([0.2]))[0, 0]
    r = prob.reference("implicit", 0.2)
    a = prob.reference("analytic", 0.2)
    xi = {t: multiplier_superiority(q, r, a, t) for t in (1, 10, 1000)}
    ok = xi[1] < 1.0 and abs(xi[1000] - 1.0) < abs(xi[10] - 1.0)
    return bool(ok), ", ".join(f"xi[{t}]={v:.6f}" for t, v in xi.items())


def check_loss_equivalence(seed=7):
    rng = np.random.default_rng(seed)
    worst_eq = 0.0
    a_e, b_e = fitting.advection_operator_pair("explicit", -0.7)
    data = fitting.ModeDataset((1, 3, 7, 12), (1.0, 0.5, 2.0, 0.25), 32)
    for _ in range(50):
        ans = fitting.AdvectionAnsatz(*rng.normal(size=2))
        ls, lr = fitting.supervised_vs_residual_losses(ans, data, a_e, b_e)
        worst_eq = max(worst_eq, abs(ls - lr) / max(ls, 1e-300))
    worst_ratio = 0.0
    g = -2.5
    a_i, b_i = fitting.advection_operator_pair("implicit", g)
    for m in (1, 5, 11):
        single = fitting.ModeDataset((m,), (1.3,), 32)
        ans = fitting.AdvectionAnsatz(*rng.normal(size=2))
        ls, lr = fitting.supervised_vs_residual_losses(ans, single, a_i, b_i)
        expect = abs(a_i(m / 32)) ** 2
        worst_ratio = max(worst_ratio, abs(lr / ls - expect) / expect)
    ok = worst_eq <= 1e-12 and worst_ratio <= 1e-10
    return ok, f"explicit rel|Lsup-Lres|={_fmt(worst_eq)}; implicit rel ratio err={_fmt(worst_ratio)}"


def check_multimode_trend():
    sets = [(1,), (1, 2), (3, 4), (1, 2, 3, 4), (1, 2, 3, 4, 5)]
    xi = {s: multimode_superiority(-3.0, s, 5, n=50).xi for s in sets}
    ok = (xi[(1,)] < 1 and xi[(1, 2)] < 1 and xi[(3, 4)] < 1
          and xi[(1, 2, 3, 4, 5)] > xi[(1, 2, 3, 4)] > xi[(1, 2)])
    return bool(ok), ", ".join("{" + ",".join(map(str, s)) + f"}}={v:.3f}" for s, v in xi.items())


def check_burgers(steps=30):
    worst_const = 0.0
    for mode in burgers.PicardMode:
        for c in (-1.3, 0.0, 0.7):
            cfg = burgers.BurgersConfig.shock_forming(mode=mode, truncate_after=3)
            u = burgers.step(np.full(cfg.n, c), cfg).new_state.values
            worst_const = max(worst_const, float(np.max(np.abs(u - c))))
    cfg = burgers.BurgersConfig.shock_forming()
    recs = burgers.picard_diagnostics(burgers.shock_forming_ic(cfg.n), cfg, steps)
    its = np.array([r.picard_iterations for r in recs])
    err = np.array([r.one_step_nrmse for r in recs])
    res = max(r.residual for r in recs)
    peak = int(np.argmax(its))
    epeak = int(np.argmax(err))
    shape = bool(its[peak] >= 3 and 0 < peak < steps - 1 and its[0] < its[peak] and its[-1] < its[peak])
    ok = worst_const <= 1e-12 and res < 1e-5 and shape and abs(epeak - peak) <= 2
    return ok, (f"const drift={_fmt(worst_const)} max residual={_fmt(res)} "
                f"iteration peak {its[peak]} at step {peak} (first {its[0]}, last {its[-1]}), "
                f"nRMSE peak at step {epeak}")


def check_bridge(seed=11):
    rng = np.random.default_rng(seed)
    n = 48
    c, dt = 0.8, 0.05
    cfg = burgers.BurgersConfig(n=n, dt=dt, nu=0.0)
    u = rng.normal(size=n)
    lin = burgers.linear_step(u, np.full(n, c), cfg).values
    gamma1 = -c * n * dt
    spec = spectral.step_multiplier(u, advection.advection_multiplier(
        "implicit", gamma1, spectral.relative_modes(n))).values
    bridge = float(np.max(np.abs(lin - spec)))
    diag = 0.0
    for _ in range(20):
        k = spectral.Kernel3(*rng.normal(size=3))
        v = rng.normal(size=n)
        direct = spectral.circular_cross_correlate(k, v).values
        via = spectral.step_multiplier(v, spectral.kernel_to_multiplier(k, n)).values
        diag = max(diag, float(np.max(np.abs(direct - via))))
    return bridge <= 1e-8 and diag <= 1e-10, f"bridge {_fmt(bridge)}; kernel vs multiplier {_fmt(diag)}"


CHECKS = [
    (1, "exact-transport identity", check_exact_transport),
    (2, "closed-form error values", check_closed_form_values),
    (3, "fit/oracle agreement", check_fit_oracle),
    (4, "self-relearn null result", check_self_relearn),
    (5, "forward superiority, advection", check_forward_advection),
    (6, "forward superiority, diffusion", check_forward_diffusion),
    (7, "backward superiority, Poisson", check_backward_poisson),
    (8, "Richardson convergence", check_richardson),
    (9, "multi-step persistence", check_multistep),
    (10, "loss equivalence", check_loss_equivalence),
    (11, "multi-mode trend", check_multimode_trend),
    (12, "Burgers constants and Picard diagnostics", check_burgers),
    (13, "cross-module bridge", check_bridge),
]


def run_one(number):
    for num, name, fn in CHECKS:
        if num == number:
            try:
                passed, detail = fn()
            except Exception as exc:  # a crash is a failed check, not an abort
                passed, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CheckResult(num, name, bool(passed), detail)
    raise KeyError(number)


def run_all(only=None):
    wanted = [num for num, _, _ in CHECKS] if not only else list(only)
    return [run_one(n) for n in wanted]
