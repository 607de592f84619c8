import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superlab import initial_conditions as ic
from superlab.errors import ConfigurationError
from superlab.spectral import rfft


def test_fixed_single_mode_is_sine():
    spec = ic.single_mode(8, 1, ic.Constant(1.0), ic.Constant(0.0))
    u = ic.generate(spec, 1)[0].values
    np.testing.assert_allclose(u, np.sin(2 * np.pi * np.arange(8) / 8), atol=1e-15)
    c = np.abs(rfft(u).coeffs)
    assert c[1] > 1 and np.all(np.delete(c, 1) < 1e-12)


def test_deterministic_and_seed_sensitive():
    spec = ic.multi_mode(32, (1, 2, 3), seed=7)
    a = ic.generate_array(spec, 5)
    b = ic.generate_array(spec, 5)
    assert a.tobytes() == b.tobytes()
    c = ic.generate_array(ic.multi_mode(32, (1, 2, 3), seed=8), 5)
    assert not np.array_equal(a, c)


def test_sample_independent_of_batch():
    spec = ic.burgers_family(seed=3)
    full = ic.generate_array(spec, 10)
    np.testing.assert_array_equal(ic.generate_array(spec, 3, start=6), full[6:9])
    np.testing.assert_array_equal(ic.generate_array(spec, 1, start=9)[0], full[9])


@given(st.sets(st.integers(1, 16), min_size=1, max_size=6), st.booleans(), st.integers(0, 2**40))
def test_spectral_support(modes, with_offset, seed):
    spec = ic.IcSpec(32, tuple(sorted(modes)), ic.Uniform(0.5, 1.0) if with_offset else None, seed)
    u = ic.generate_array(spec, 1)[0]
    c = np.abs(rfft(u).coeffs)
    active = set(modes) | ({0} if with_offset else set())
    for k in range(17):
        if k in active:
            assert c[k] > 1e-6
        else:
            assert c[k] < 1e-12


def test_modes_one_to_five_support():
    u = ic.generate_array(ic.multi_mode(64, range(1, 6)), 3)
    for row in u:
        c = np.abs(rfft(row).coeffs)
        assert np.all(c[6:] < 1e-12) and c[0] < 1e-12


def test_amplitude_moments_converge():
    law = ic.Uniform(0.5, 2.0)
    spec = ic.single_mode(16, 2, law, seed=11)
    amps = np.array([ic.sample_parameters(spec, i)[0][0] for i in range(10_000)])
    assert amps.mean() == pytest.approx(law.mean, rel=0.05)
    assert amps.var() == pytest.approx(law.var, rel=0.05)
    phases = np.array([ic.sample_parameters(spec, i)[1][0] for i in range(10_000)])
    assert phases.mean() == pytest.approx(np.pi, rel=0.05)


def test_degenerate_specs_rejected():
    with pytest.raises(ConfigurationError):
        ic.IcSpec(16, ())
    with pytest.raises(ConfigurationError):
        ic.IcSpec(16, (), ic.Constant(0.0))
    with pytest.raises(ConfigurationError):
        ic.IcSpec(16, (9,))
    with pytest.raises(ConfigurationError):
        ic.IcSpec(15, (1,))
    with pytest.raises(ConfigurationError):
        ic.generate(ic.single_mode(16, 1), 0)
    with pytest.raises(ConfigurationError):
        ic.Uniform(2.0, 1.0)
    # a pure offset is allowed
    assert np.allclose(ic.generate_array(ic.IcSpec(8, (), ic.Constant(0.4)), 1), 0.4)


def test_parse_law():
    assert ic.parse_law("0.5") == ic.Constant(0.5)
    assert ic.parse_law("-0.5:0.5") == ic.Uniform(-0.5, 0.5)
    with pytest.raises(ConfigurationError):
        ic.parse_law("a:b")
    with pytest.raises(ConfigurationError):
        ic.parse_law("1:2:3")


def test_burgers_family_defaults():
    spec = ic.burgers_family()
    assert spec.n == 60 and spec.modes[0].mode == 1
    u = ic.generate_array(spec, 50)
    means = u.mean(axis=1)
    assert np.all(np.abs(means) <= 0.5)
    np.testing.assert_allclose(np.sqrt(2 * np.mean((u - means[:, None]) ** 2, axis=1)), 1.0, atol=1e-12)
