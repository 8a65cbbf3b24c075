import warnings

import numpy as np
import pytest

from ivexp import oracle
from ivexp.ctmc import (is_sound_step, row_sum_diagnostics, steps_for_tolerance, transition_bounds,
                        transition_operators, validate_generator)
from ivexp.errors import EmptyRowError, UnsoundWarning
from ivexp.intervals import IntervalVector
from ivexp.linalg import matrix_exp

from .conftest import P_LOWER_80, P_LOWER_200, P_UPPER_80, P_UPPER_200, Q_LOWER, Q_UPPER


def test_validate_fixture(generator):
    assert generator.metzler
    assert generator.n == 3
    for row in generator.base.rows:
        assert len(row.eq_constraints) == 1


def test_point_generator_and_empty_rows():
    q = np.array([[-1.0, 1.0, 0.0], [0.5, -1.0, 0.5], [0.0, 2.0, -2.0]])
    g = validate_generator(q, q)
    assert g.base.is_point
    bad = q.copy()
    bad[1, 1] = -0.5
    with pytest.raises(EmptyRowError) as info:
        validate_generator(bad, bad)
    assert info.value.row == 1
    with pytest.raises(EmptyRowError) as info:
        validate_generator(Q_LOWER + 10.0, Q_UPPER + 10.0)
    assert info.value.row == 0
    with pytest.raises(ValueError):
        validate_generator(Q_UPPER, Q_LOWER)


def test_non_metzler_flag():
    lo = np.array([[-1.0, -0.1], [0.5, -1.0]])
    hi = np.array([[0.1, 1.0], [1.0, -0.5]])
    g = validate_generator(lo, hi)
    assert not g.metzler
    with pytest.warns(UnsoundWarning):
        rep = transition_bounds(g, 0.1, 10)
    assert not rep.sound


def test_time_zero(generator):
    rep = transition_bounds(generator, 0.0, 5)
    np.testing.assert_array_equal(rep.lower, np.eye(3))
    np.testing.assert_array_equal(rep.upper, np.eye(3))
    assert rep.radius == 0.0


@pytest.mark.parametrize("steps, lower, upper", [(80, P_LOWER_80, P_UPPER_80),
                                                 (200, P_LOWER_200, P_UPPER_200)])
def test_printed_tables(generator, steps, lower, upper):
    rep = transition_bounds(generator, 0.2, steps)
    assert np.max(np.abs(rep.lower - lower)) <= 5e-4
    assert np.max(np.abs(rep.upper - upper)) <= 5e-4
    assert rep.sound


def test_row_sums_bracket_one(generator):
    rep = transition_bounds(generator, 0.2, 80)
    diag = row_sum_diagnostics(rep)
    assert diag["lower_row_sums"][0] == pytest.approx(0.7424, abs=5e-4)
    assert diag["upper_row_sums"][0] == pytest.approx(1.2267, abs=5e-4)
    for lo_sum, hi_sum in zip(diag["lower_row_sums"], diag["upper_row_sums"]):
        assert lo_sum <= 1.0 <= hi_sum + 3 * rep.radius
    assert np.all(rep.lower <= rep.upper)


def test_columns_match_operators(generator):
    rep = transition_bounds(generator, 0.2, 50)
    for j in range(3):
        col = transition_operators(generator, 0.2, 50, np.eye(3)[j])
        np.testing.assert_allclose(col.lower, rep.lower[:, j], atol=1e-14)
        np.testing.assert_allclose(col.upper, rep.upper[:, j], atol=1e-14)


def test_operator_on_uniform_distribution(generator):
    rep = transition_bounds(generator, 0.2, 200)
    u = np.full(3, 1 / 3)
    op = transition_operators(generator, 0.2, 200, u)
    # the joint optimum can only be tighter than combining the columns separately
    assert np.all(op.lower >= rep.lower @ u - 1e-12)
    assert np.all(op.upper <= rep.upper @ u + 1e-12)
    iv = IntervalVector(np.zeros(3), u)
    wide = transition_operators(generator, 0.2, 200, iv)
    assert np.all(wide.lower <= op.lower + 1e-12) and np.all(wide.upper >= op.upper - 1e-12)


def test_point_generator_recovers_exponential(rng):
    for _ in range(20):
        n = int(rng.integers(2, 5))
        q = rng.uniform(0, 2, (n, n))
        np.fill_diagonal(q, 0.0)
        np.fill_diagonal(q, -q.sum(axis=1))
        g = validate_generator(q, q)
        t = rng.uniform(0.1, 1.0)
        rep = transition_bounds(g, t, 500)
        exact = matrix_exp(t * q)
        assert np.max(np.abs(rep.lower - exact)) <= rep.radius
        assert np.max(np.abs(rep.upper - exact)) <= rep.radius


def test_monte_carlo_domination(generator):
    rep = transition_bounds(generator, 0.2, 80)
    samples = oracle.sample_many(generator.base, [1.0, 0.0, 0.0], 0.2, 500, seed=2024)
    res = oracle.check_domination(rep, samples, slack=1e-9)
    assert res.ok
    assert res.samples == 500


def test_step_helpers(generator):
    assert is_sound_step(generator, 0.2, 80)
    assert not is_sound_step(generator, 0.2, 1)
    n = steps_for_tolerance(generator, 0.2, 1.0)
    rep = transition_bounds(generator, 0.2, n)
    assert rep.radius <= 1.0


def test_witnesses_per_column(generator):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = transition_bounds(generator, 0.2, 5, witnesses=True)
    assert len(rep.witnesses) == 3 and len(rep.witnesses[0]) == 5
    for column in rep.witnesses:
        for q_lo, q_hi in column:
            assert generator.base.contains(q_lo) and generator.base.contains(q_hi)
