import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superlab import linalg
from superlab.errors import FactorizationError, ValidationError

from oracles import gauss_solve


def test_identity():
    b = np.array([1.0, -2.0, 3.5])
    np.testing.assert_array_equal(linalg.lu_solve(np.eye(3), b), b)


def test_permutation():
    p = np.eye(4)[[2, 0, 3, 1]]
    b = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(linalg.lu_solve(p, b), p.T @ b)


def test_diag_dominant_vs_gauss_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.normal(size=(4, 4))
        a += np.diag(np.sum(np.abs(a), axis=1) + 1)
        b = rng.normal(size=4)
        np.testing.assert_allclose(linalg.lu_solve(a, b), gauss_solve(a, b), atol=1e-10)


def test_needs_pivoting():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(linalg.lu_solve(a, np.array([2.0, 3.0])), [3.0, 2.0])


@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_residual_bound(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + n * np.eye(n)
    b = rng.normal(size=n)
    x = linalg.lu_solve(a, b)
    bound = 1e-10 * (np.linalg.norm(a, np.inf) * np.max(np.abs(x)) + np.max(np.abs(b)))
    assert np.max(np.abs(a @ x - b)) <= bound


def test_factors_reusable():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(6, 6)) + 6 * np.eye(6)
    f = linalg.lu_factor(a)
    for _ in range(3):
        b = rng.normal(size=6)
        np.testing.assert_allclose(a @ f.solve(b), b, atol=1e-12)


def test_singular_raises():
    with pytest.raises(FactorizationError):
        linalg.lu_factor(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(FactorizationError):
        linalg.lu_factor(np.zeros((3, 3)))


def test_bad_input():
    with pytest.raises(ValidationError):
        linalg.lu_factor(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        linalg.lu_factor(np.array([[np.nan]]))
    with pytest.raises(ValidationError):
        linalg.lu_factor(np.eye(2)).solve(np.ones(3))
