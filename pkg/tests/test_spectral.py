import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from superlab import spectral
from superlab.advection import advection_multiplier
from superlab.errors import ConfigurationError, ValidationError
from superlab.spectral import GridState, Kernel3, SpectralState

from oracles import correlate_direct, dft_direct

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def even_states(min_n=4, max_n=64):
    return st.integers(min_n // 2, max_n // 2).flatmap(
        lambda h: arrays(float, 2 * h, elements=finite))


def test_constant_is_dc_only():
    spec = spectral.rfft(GridState(np.full(8, 2.5)))
    assert spec.coeffs[0] == pytest.approx(8 * 2.5)
    np.testing.assert_allclose(spec.coeffs[1:], 0.0, atol=1e-13)


def test_sine_mode_one_matches_direct_sum():
    x = np.arange(8) / 8
    u = np.sin(2 * np.pi * x)
    c = spectral.rfft(u).coeffs
    np.testing.assert_allclose(c, dft_direct(u), atol=1e-12)
    assert c[1] == pytest.approx(-4j, abs=1e-12)
    np.testing.assert_allclose(np.delete(c, 1), 0.0, atol=1e-12)


@pytest.mark.parametrize("n", [3, 5, 2])
def test_rejects_odd_or_tiny_n(n):
    with pytest.raises(ConfigurationError):
        spectral.rfft(np.ones(n))


def test_rejects_empty_state():
    with pytest.raises(ValidationError):
        spectral.rfft(np.ones(0))


def test_round_trip_n100():
    u = np.random.default_rng(0).normal(size=100)
    back = spectral.irfft(spectral.rfft(u)).values
    np.testing.assert_allclose(back, u, atol=1e-12)


def test_irfft_trivial_spectra():
    assert np.all(spectral.irfft(SpectralState(np.zeros(5, complex), 8)).values == 0.0)
    c = np.zeros(5, complex)
    c[0] = 8
    np.testing.assert_allclose(spectral.irfft(SpectralState(c, 8)).values, 1.0, atol=1e-15)


def test_irfft_rejects_reality_violation():
    c = np.zeros(5, complex)
    c[0] = 1 + 1j
    with pytest.raises(ValidationError):
        spectral.irfft(SpectralState(c, 8))
    c = np.zeros(5, complex)
    c[4] = 0.3j
    with pytest.raises(ValidationError):
        spectral.irfft(SpectralState(c, 8))


def test_spectral_state_length_checked():
    with pytest.raises(ValidationError):
        SpectralState(np.zeros(4, complex), 8)


def test_grid_state_is_read_only_and_finite():
    g = GridState([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        g.values[0] = 9.0
    with pytest.raises(ValidationError):
        GridState([1.0, np.nan, 0.0, 0.0])
    assert g.n == 4
    np.testing.assert_allclose(g.x, [0, 0.25, 0.5, 0.75])


def test_identity_and_shift_kernels():
    u = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(spectral.circular_cross_correlate(Kernel3(0, 1, 0), u).values, u)
    np.testing.assert_array_equal(spectral.circular_cross_correlate(Kernel3(1, 0, 0), u).values,
                                  [4.0, 1.0, 2.0, 3.0])


def test_explicit_kernel_equals_spectral_step():
    g = -0.5
    k = Kernel3(-g, 1 + g, 0.0)
    u = np.random.default_rng(1).normal(size=32)
    mult = advection_multiplier("explicit", g, spectral.relative_modes(32))
    via = spectral.step_multiplier(u, mult).values
    np.testing.assert_allclose(spectral.circular_cross_correlate(k, u).values, via, atol=1e-10)


def test_kernel_multiplier_examples():
    np.testing.assert_allclose(spectral.kernel_to_multiplier(Kernel3(0, 1, 0), 16), 1.0)
    phi = spectral.relative_modes(16)
    for g in (-0.3, -1.0, -2.7):
        m = spectral.kernel_to_multiplier(Kernel3(-g, 1 + g, 0), 16)
        np.testing.assert_allclose(m, advection_multiplier("explicit", g, phi), atol=1e-14)
    sym = spectral.kernel_to_multiplier(Kernel3(0.3, -1.1, 0.3), 16)
    assert np.max(np.abs(sym.imag)) < 1e-15


def test_apply_multiplier_basics():
    spec = spectral.rfft(np.random.default_rng(2).normal(size=16))
    np.testing.assert_array_equal(spectral.apply_multiplier(spec, np.ones(9)).coeffs, spec.coeffs)
    assert np.all(spectral.apply_multiplier(spec, np.zeros(9)).coeffs == 0)
    with pytest.raises(ValidationError):
        spectral.apply_multiplier(spec, np.ones(8))


def test_power_vs_iterate_t20():
    rng = np.random.default_rng(3)
    spec = spectral.rfft(rng.normal(size=24))
    m = spectral.kernel_to_multiplier(Kernel3(*rng.uniform(-0.6, 0.6, 3)), 24)
    cur = spec
    for _ in range(20):
        cur = spectral.apply_multiplier(cur, m)
    np.testing.assert_allclose(cur.coeffs, spec.coeffs * m ** 20, rtol=1e-10, atol=1e-10)


def test_rollout_kernel_matches_multiplier_rollout():
    rng = np.random.default_rng(4)
    u = rng.normal(size=20)
    k = Kernel3(0.2, 0.5, 0.3)
    a = spectral.rollout_kernel(u, k, 15)
    b = spectral.rollout_multiplier(u, spectral.kernel_to_multiplier(k, 20), 15)
    assert a.shape == (16, 20)
    np.testing.assert_allclose(a, b, atol=1e-10)
    np.testing.assert_array_equal(a[0], u)


def test_parseval_n100():
    u = np.random.default_rng(5).normal(size=100)
    e = spectral.parseval_energy(spectral.rfft(u))
    assert e == pytest.approx(np.sum(u ** 2), rel=1e-10)


@given(even_states())
def test_rfft_matches_direct_dft(u):
    np.testing.assert_allclose(spectral.rfft(u).coeffs, dft_direct(u), atol=1e-9)


@given(even_states(), st.tuples(finite, finite, finite))
def test_diagonalization_property(u, taps):
    k = Kernel3(*taps)
    direct = spectral.circular_cross_correlate(k, u).values
    np.testing.assert_allclose(direct, correlate_direct(taps, u), atol=1e-10)
    via = spectral.step_multiplier(u, spectral.kernel_to_multiplier(k, len(u))).values
    np.testing.assert_allclose(direct, via, atol=1e-10 * (1 + np.max(np.abs(direct))))


@given(even_states(), even_states(), finite)
def test_linearity(u, v, a):
    if len(u) != len(v):
        v = np.resize(v, len(u))
    k = Kernel3(0.4, -1.0, 2.0)
    lhs = spectral.circular_cross_correlate(k, a * u + v).values
    rhs = a * spectral.circular_cross_correlate(k, u).values + spectral.circular_cross_correlate(k, v).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * (1 + np.max(np.abs(rhs))))
    fu = spectral.rfft(a * u + v).coeffs
    np.testing.assert_allclose(fu, a * spectral.rfft(u).coeffs + spectral.rfft(v).coeffs,
                               atol=1e-9 * (1 + np.max(np.abs(fu))))


@given(even_states())
def test_parseval_property(u):
    assert spectral.parseval_energy(spectral.rfft(u)) == pytest.approx(np.sum(u ** 2), rel=1e-10, abs=1e-10)
