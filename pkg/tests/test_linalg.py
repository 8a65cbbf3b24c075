import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ivexp.errors import DimensionError, MatrixExpError
from ivexp.linalg import as_matrix, inf_norm, mat_mul, mat_vec, matrix_exp

from .conftest import Q_UPPER


def test_inf_norm_examples():
    assert inf_norm(np.zeros((3, 3))) == 0.0
    assert inf_norm(np.eye(4)) == 1.0
    # brute-force row sums of the upper generator bound
    brute = max(sum(abs(v) for v in row) for row in Q_UPPER.tolist())
    assert brute == 12.0
    assert inf_norm(Q_UPPER) == 12.0


def test_matrix_exp_examples():
    np.testing.assert_array_equal(matrix_exp(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(matrix_exp([[0.0, 1.0], [0.0, 0.0]]), [[1.0, 1.0], [0.0, 1.0]],
                               rtol=0, atol=1e-15)
    a, b = 0.56766764161830634595, 0.43233235838169365405
    np.testing.assert_allclose(matrix_exp([[-1.0, 1.0], [1.0, -1.0]]), [[a, b], [b, a]],
                               rtol=0, atol=1e-15)


def _expm_reference(a):
    # 40-digit reference; double-precision library routines drift past 1e-12 at norm ~15
    with mpmath.workdps(40):
        return np.array(mpmath.expm(mpmath.matrix(a.tolist())).tolist(), dtype=float)


def test_matrix_exp_relative_accuracy(rng):
    for _ in range(300):
        n = int(rng.integers(1, 7))
        a = rng.uniform(-2, 2, (n, n))
        a *= rng.uniform(0, 16) / max(inf_norm(a), 1e-300)
        ref = _expm_reference(a)
        err = inf_norm(matrix_exp(a) - ref) / inf_norm(ref)
        assert err <= 1e-12


def test_matrix_exp_scaling_cap():
    with pytest.raises(MatrixExpError):
        matrix_exp(np.array([[1e300, 0.0], [0.0, 0.0]]))


def test_products():
    x = np.array([1.5, -2.0])
    np.testing.assert_array_equal(mat_vec(np.eye(2), x), x)
    np.testing.assert_array_equal(mat_vec(np.zeros((2, 2)), x), [0.0, 0.0])
    np.testing.assert_array_equal(mat_vec([[1, 2], [3, 4]], [1, 1]), [3.0, 7.0])
    with pytest.raises(DimensionError):
        mat_vec(np.eye(2), np.ones(3))
    with pytest.raises(DimensionError):
        mat_mul(np.eye(2), np.eye(3))


def test_validation():
    with pytest.raises(DimensionError):
        as_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])


def _corpus(rng, count=1000, max_norm=4.0):
    for _ in range(count):
        n = int(rng.integers(1, 6))
        a = rng.uniform(-2, 2, (n, n))
        yield a * (rng.uniform(0, max_norm) / inf_norm(a))


def test_exp_norm_and_linear_remainder(rng):
    for a in _corpus(rng):
        m = inf_norm(a)
        e = matrix_exp(a)
        assert inf_norm(e) <= np.exp(m) * (1 + 1e-12)
        assert inf_norm(e - np.eye(len(a)) - a) <= 0.5 * m * m * np.exp(m) * (1 + 1e-12) + 1e-15


def test_exp_inverse(rng):
    for a in _corpus(rng, count=300):
        np.testing.assert_allclose(matrix_exp(a) @ matrix_exp(-a), np.eye(len(a)), atol=1e-9)


square = st.integers(1, 5).flatmap(
    lambda n: st.tuples(*[arrays(np.float64, (n, n), elements=st.floats(-10, 10))] * 2))


@settings(max_examples=200, deadline=None)
@given(square)
def test_inf_norm_submultiplicative(pair):
    a, b = pair
    assert inf_norm(a @ b) <= inf_norm(a) * inf_norm(b) * (1 + 1e-12) + 1e-12
