import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superlab import burgers, spectral
from superlab.advection import advection_multiplier
from superlab.burgers import BurgersConfig, PicardMode
from superlab.errors import ConfigurationError

from oracles import dense_from_stencil


@pytest.fixture(scope="module")
def ops60():
    return burgers.build_operator_matrices(60)


def test_backward_difference_example():
    ops = burgers.build_operator_matrices(4, dx=1.0)
    np.testing.assert_allclose(ops.backward @ np.array([0.0, 1.0, 2.0, 3.0]), [-3, 1, 1, 1])


def test_operator_structure(ops60):
    one = np.ones(60)
    for m in (ops60.laplacian, ops60.forward, ops60.backward):
        np.testing.assert_allclose(m @ one, 0.0, atol=1e-9)
    np.testing.assert_array_equal(ops60.laplacian, ops60.laplacian.T)
    np.testing.assert_array_equal(ops60.forward, -ops60.backward.T)


def test_operators_match_stencil_oracle():
    n, dx = 7, 0.5
    ops = burgers.build_operator_matrices(n, dx)
    np.testing.assert_allclose(ops.laplacian, dense_from_stencil(n, {-1: 1, 0: -2, 1: 1}) / dx ** 2)
    np.testing.assert_allclose(ops.forward, dense_from_stencil(n, {0: -1, 1: 1}) / dx)
    np.testing.assert_allclose(ops.backward, dense_from_stencil(n, {-1: -1, 0: 1}) / dx)


def test_upwind_examples(ops60):
    assert np.all(burgers.upwind_matrix(np.zeros(60), ops60) == 0)
    np.testing.assert_allclose(burgers.upwind_matrix(np.ones(60), ops60), ops60.backward)
    g = burgers.upwind_matrix(-np.ones(60), ops60)
    np.testing.assert_allclose(g, -ops60.forward)
    u = np.sin(np.linspace(0, 3, 60))
    np.testing.assert_allclose(g @ u, -1.0 * (ops60.forward @ u), atol=1e-12)


def test_upwind_matches_formula(ops60):
    w = np.random.default_rng(0).normal(size=60)
    wb = 0.5 * (np.roll(w, -1) + w)
    wf = 0.5 * (np.roll(w, 1) + w)
    expect = np.diag(np.maximum(wb, 0)) @ ops60.backward + np.diag(np.minimum(wf, 0)) @ ops60.forward
    np.testing.assert_allclose(burgers.upwind_matrix(w, ops60), expect, atol=1e-12)
    literal = np.diag(np.maximum(wb, 0)) @ ops60.backward + np.diag(np.maximum(wf, 0)) @ ops60.forward
    np.testing.assert_allclose(burgers.upwind_matrix(w, ops60, literal=True), literal, atol=1e-12)


def test_upwind_length_checked(ops60):
    with pytest.raises(ConfigurationError):
        burgers.upwind_matrix(np.ones(10), ops60)


def test_assemble_examples(ops60):
    u = np.random.default_rng(1).normal(size=60)
    cfg = BurgersConfig(dt=1e-300, nu=0.0)
    np.testing.assert_allclose(burgers.assemble_system(u, cfg, ops60), np.eye(60), atol=1e-200)
    np.testing.assert_array_equal(burgers.assemble_system(np.zeros(60), BurgersConfig(nu=0.0), ops60), np.eye(60))
    cfg = BurgersConfig(dt=0.1, nu=0.01)
    a = burgers.assemble_system(np.zeros(60), cfg, ops60)
    np.testing.assert_allclose(a, a.T)
    assert np.min(np.linalg.eigvalsh(a)) >= 1.0 - 1e-12
    # Fourier eigenvalues of I - dt*nu*L
    k = np.arange(60)
    lam = 1 + cfg.dt * cfg.nu * (2 - 2 * np.cos(2 * np.pi * k / 60)) * 60 ** 2
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(a)), np.sort(lam), rtol=1e-10)


def test_config_validation():
    for bad in (dict(n=4), dict(dt=0.0), dict(nu=-1.0), dict(picard_tolerance=0.0),
                dict(max_picard_iters=0), dict(mode="truncated", truncate_after=0)):
        with pytest.raises(ConfigurationError):
            BurgersConfig(**bad)
    with pytest.raises(ValueError):
        BurgersConfig(mode="newton")


def test_regime_preset_mapping():
    cfg = BurgersConfig.paper_regime()
    assert cfg.n == 60
    assert cfg.diffusion_gamma == pytest.approx(0.2)
    assert cfg.convection_number() == pytest.approx(8.0)


def test_zero_state_step():
    rep = burgers.step(np.zeros(60), BurgersConfig.shock_forming())
    assert np.all(rep.new_state.values == 0)
    assert rep.picard_iterations == 1 and rep.final_residual == 0.0 and rep.converged


@given(st.floats(-2, 2), st.sampled_from(list(PicardMode)), st.floats(0.0, 0.1), st.floats(1e-3, 0.5))
@settings(max_examples=25)
def test_constants_preserved(c, mode, nu, dt):
    cfg = BurgersConfig(n=24, dt=dt, nu=nu, mode=mode, truncate_after=2)
    u = burgers.step(np.full(24, c), cfg).new_state.values
    np.testing.assert_allclose(u, c, atol=1e-12)


def test_state_size_checked():
    with pytest.raises(ConfigurationError):
        burgers.step(np.zeros(10), BurgersConfig())


def test_converged_is_fixed_point():
    cfg = BurgersConfig.shock_forming()
    ops = burgers.build_operator_matrices(cfg.n)
    u = burgers.shock_forming_ic(cfg.n).values
    for _ in range(12):
        rep = burgers.step(u, cfg, ops)
        assert rep.converged and rep.final_residual < cfg.picard_tolerance
        assert burgers.nonlinear_residual(rep.new_state, u, cfg, ops) == pytest.approx(rep.final_residual)
        u = rep.new_state.values


def test_truncated_with_converged_count_matches():
    cfg = BurgersConfig.shock_forming()
    ops = burgers.build_operator_matrices(cfg.n)
    u = burgers.rollout(burgers.shock_forming_ic(cfg.n), cfg, 8)[-1]
    conv = burgers.step(u, cfg, ops)
    assert conv.picard_iterations >= 2
    tr = burgers.step(u, cfg.with_mode("truncated", conv.picard_iterations), ops)
    assert tr.picard_iterations == conv.picard_iterations
    np.testing.assert_allclose(tr.new_state.values, conv.new_state.values, atol=1e-12)
    p1 = burgers.step(u, cfg.with_mode("p1"), ops)
    assert p1.picard_iterations == 1
    one = burgers.step(u, cfg.with_mode("truncated", 1), ops)
    np.testing.assert_array_equal(p1.new_state.values, one.new_state.values)


def test_p1_one_solve_around_previous_state():
    cfg = BurgersConfig.shock_forming(mode="p1")
    u = burgers.shock_forming_ic(cfg.n).values
    direct = burgers.linear_step(u, u, cfg).values
    np.testing.assert_allclose(burgers.step(u, cfg).new_state.values, direct, atol=1e-14)


def test_non_convergence_is_reported():
    cfg = BurgersConfig.shock_forming(max_picard_iters=1, picard_tolerance=1e-14)
    rep = burgers.step(burgers.shock_forming_ic(cfg.n), cfg)
    assert rep.picard_iterations == 1 and not rep.converged


def test_rollout_basics():
    cfg = BurgersConfig.shock_forming()
    ic = burgers.shock_forming_ic(cfg.n)
    t0 = burgers.rollout(ic, cfg, 0)
    assert t0.shape == (1, 60)
    np.testing.assert_array_equal(t0[0], ic.values)
    traj, reps = burgers.rollout(ic, cfg, 3, return_reports=True)
    assert traj.shape == (4, 60) and len(reps) == 3


def test_p1_and_converged_agree_while_smooth():
    cfg = BurgersConfig(n=60, dt=0.002, nu=0.002)
    ic = 0.2 * np.sin(2 * np.pi * np.arange(60) / 60)
    conv, reps = burgers.rollout(ic, cfg, 5, return_reports=True)
    p1 = burgers.rollout(ic, cfg.with_mode("p1"), 5)
    assert max(r.picard_iterations for r in reps) <= 2
    np.testing.assert_allclose(p1, conv, atol=1e-6)


def test_near_linear_regime_few_iterations():
    cfg = BurgersConfig(n=60, dt=0.01, nu=0.05)
    ic = 0.05 * np.sin(2 * np.pi * np.arange(60) / 60 - 0.4)
    recs = burgers.picard_diagnostics(ic, cfg, 20)
    assert max(r.picard_iterations for r in recs) <= 2


def test_zero_ic_diagnostics():
    recs = burgers.picard_diagnostics(np.zeros(60), BurgersConfig.shock_forming(), 5)
    assert all(r.picard_iterations == 1 and r.one_step_nrmse == 0.0 for r in recs)
    assert [r.step for r in recs] == list(range(5))


def test_shock_forming_iteration_profile():
    cfg = BurgersConfig.shock_forming()
    recs = burgers.picard_diagnostics(burgers.shock_forming_ic(cfg.n), cfg, 30)
    its = np.array([r.picard_iterations for r in recs])
    err = np.array([r.one_step_nrmse for r in recs])
    peak = int(np.argmax(its))
    assert its[peak] >= 3 and 0 < peak < 29
    assert its[0] < its[peak] and its[-1] < its[peak]
    assert abs(int(np.argmax(err)) - peak) <= 2
    assert all(r.residual < 1e-5 for r in recs)


def test_energy_decays_late():
    cfg = BurgersConfig.shock_forming()
    traj = burgers.rollout(burgers.shock_forming_ic(cfg.n), cfg, 60)
    e = np.mean((traj - traj.mean(axis=1, keepdims=True)) ** 2, axis=1)
    late = np.mean(traj ** 2, axis=1)[20:]
    assert np.all(np.diff(late) <= 1e-12)
    assert e[-1] < e[0]


def test_literal_flag_changes_result():
    cfg = BurgersConfig.shock_forming()
    lit = BurgersConfig.shock_forming(literal_upwind=True)
    ic = burgers.shock_forming_ic(cfg.n)
    a = burgers.step(ic, cfg).new_state.values
    b = burgers.step(ic, lit).new_state.values
    assert np.max(np.abs(a - b)) > 1e-3
    # the literal form drops negative winds entirely and doubles positive ones
    ops = burgers.build_operator_matrices(cfg.n)
    assert np.all(burgers.upwind_matrix(ic.values - 2.0, ops, literal=True) == 0)
    w = np.full(cfg.n, 0.5)
    np.testing.assert_allclose(burgers.upwind_matrix(w, ops, literal=True),
                               0.5 * (ops.backward + ops.forward), atol=1e-12)


@pytest.mark.parametrize("c", [0.8, -0.6])
def test_bridge_to_implicit_advection(c):
    n, dt = 48, 0.05
    cfg = BurgersConfig(n=n, dt=dt, nu=0.0)
    u = np.random.default_rng(5).normal(size=n)
    lin = burgers.linear_step(u, np.full(n, c), cfg).values
    if c > 0:
        spec = spectral.step_multiplier(u, advection_multiplier("implicit", -c * n * dt,
                                                                spectral.relative_modes(n))).values
    else:
        # negative wind is the mirror problem: forward differencing with |c|
        mult = 1.0 / (1.0 + c * n * dt * (np.exp(2j * np.pi * spectral.relative_modes(n)) - 1.0))
        spec = spectral.step_multiplier(u, mult).values
    np.testing.assert_allclose(lin, spec, atol=1e-8)
