import os
import subprocess
import sys

import numpy as np
import pytest

from superlab import _accel, kernels

pytestmark = pytest.mark.skipif("numba" not in kernels.BACKENDS, reason="numba not installed")


@pytest.fixture(scope="module")
def both():
    return kernels.BACKENDS["numpy"], kernels.BACKENDS["numba"]


def test_correlate_and_rollout(both):
    rng = np.random.default_rng(0)
    taps = rng.normal(size=3)
    u = rng.normal(size=33)
    a, b = both
    np.testing.assert_allclose(a["correlate3"](taps, u), b["correlate3"](taps, u), atol=1e-14)
    np.testing.assert_allclose(a["rollout3"](taps * 0.4, u, 12), b["rollout3"](taps * 0.4, u, 12), atol=1e-12)


def test_lu(both):
    rng = np.random.default_rng(1)
    m = rng.normal(size=(9, 9))
    rhs = rng.normal(size=9)
    a, b = both
    lu_a, piv_a, info_a = a["lu_factor"](m.copy(), 1e-14)
    lu_b, piv_b, info_b = b["lu_factor"](m.copy(), 1e-14)
    assert info_a == info_b == -1
    np.testing.assert_array_equal(piv_a, piv_b)
    np.testing.assert_allclose(lu_a, lu_b, atol=1e-12)
    np.testing.assert_allclose(a["lu_solve"](lu_a, piv_a, rhs), b["lu_solve"](lu_b, piv_b, rhs), atol=1e-12)
    sing = np.ones((3, 3))
    assert a["lu_factor"](sing, 1e-14)[2] >= 0 and b["lu_factor"](sing, 1e-14)[2] >= 0


@pytest.mark.parametrize("literal", [False, True])
def test_upwind(both, literal):
    w = np.random.default_rng(2).normal(size=20)
    a, b = both
    np.testing.assert_allclose(a["upwind_matrix"](w, 20.0, literal), b["upwind_matrix"](w, 20.0, literal),
                               atol=1e-13)


def test_active_backend_matches_flag():
    assert _accel.backend_name() in ("numba", "numpy")
    env = dict(os.environ, SUPERLAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import superlab; print(superlab.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
