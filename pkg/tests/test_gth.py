import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gthchain.benchmark import max_relative_error
from gthchain.censoring import censor
from gthchain.core import validate_stochastic
from gthchain.errors import ReducibleChainError, ZeroDenominatorError
from gthchain.families import cycle, nearly_uncoupled, random_chain, random_rational_chain, to_float
from gthchain.gth import (
    gth_back_substitute,
    gth_eliminate_step,
    gth_forward,
    gth_solve,
    naive_gaussian_solve,
)
from gthchain.oracles import power_iteration_oracle, rational_solve_oracle

seeds = st.integers(0, 2**31 - 1)


def test_step_symmetric_two_state():
    np.testing.assert_array_equal(gth_eliminate_step([[0.5, 0.5], [0.5, 0.5]]), [[1.0]])


def test_step_three_cycle(three_cycle):
    np.testing.assert_array_equal(gth_eliminate_step(three_cycle), [[0, 1], [1, 0]])


def test_step_matches_censoring_seed7():
    p = random_chain(5, 7)
    np.testing.assert_allclose(gth_eliminate_step(p), censor(p, range(1, 5)), rtol=0, atol=1e-12)


def test_forward_two_state(two_state):
    tr = gth_forward(two_state)
    np.testing.assert_array_equal(tr.level(2), two_state)
    np.testing.assert_array_equal(tr.level(1), [[1.0]])
    assert tr.denominators[1] == 0.1


@pytest.mark.parametrize("n", [2, 4])
def test_forward_absorbing_top_state(n):
    with pytest.raises(ZeroDenominatorError) as exc:
        gth_forward(np.eye(n))
    assert exc.value.level == n


def test_forward_levels_are_stochastic_seed7():
    tr = gth_forward(random_chain(8, 7))
    for k in range(8, 0, -1):
        assert validate_stochastic(tr.level(k), 1e-10)
    assert tr.level(1)[0, 0] == pytest.approx(1.0, abs=1e-10)


def test_back_substitute_examples(two_state):
    np.testing.assert_allclose(gth_back_substitute(gth_forward(two_state)), [1.0, 2.0])
    np.testing.assert_array_equal(gth_back_substitute(gth_forward([[0.5, 0.5], [0.5, 0.5]])), [1, 1])


def test_back_substitute_ratios_vs_power_iteration_seed7():
    p = random_chain(6, 7)
    r = gth_back_substitute(gth_forward(p))
    v = power_iteration_oracle(p, tol=1e-14)
    np.testing.assert_allclose(r, v / v[0], rtol=1e-10)


def test_solve_examples(two_state):
    np.testing.assert_allclose(gth_solve(two_state), [1 / 3, 2 / 3], rtol=1e-15)
    np.testing.assert_allclose(gth_solve(to_float(cycle(5))), [0.2] * 5, rtol=1e-15)
    assert gth_solve([[1.0]]).tolist() == [1.0]


def test_solve_rejects_reducible():
    with pytest.raises(ReducibleChainError):
        gth_solve([[1.0, 0.0], [0.5, 0.5]])


def test_solve_50x50_seed11_vs_exact():
    r = random_rational_chain(50, 11)
    assert max_relative_error(gth_solve(to_float(r)), rational_solve_oracle(r)) <= 1e-12


def test_compensated_summation_agrees():
    p = random_chain(40, 5)
    np.testing.assert_allclose(gth_solve(p, compensated=True), gth_solve(p), rtol=1e-13)


def test_naive_ge_examples(two_state):
    np.testing.assert_allclose(naive_gaussian_solve(two_state), [1 / 3, 2 / 3], rtol=1e-14)
    r = random_rational_chain(10, 3)
    exact = rational_solve_oracle(r)
    p = to_float(r)
    assert max_relative_error(naive_gaussian_solve(p), exact) <= 1e-12
    assert max_relative_error(gth_solve(p), exact) <= 1e-12


def test_naive_ge_loses_accuracy_on_nearly_uncoupled_chain():
    r = nearly_uncoupled(4, 1e-12)
    exact = rational_solve_oracle(r)
    p = to_float(r)
    gth_err = max_relative_error(gth_solve(p), exact)
    ge_err = max_relative_error(naive_gaussian_solve(p), exact)
    assert gth_err <= 1e-12
    # measured, not a bound: the subtraction in the pivot costs digits
    assert ge_err > gth_err


# -- properties -----------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), seeds)
def test_every_level_is_stochastic(n, seed):
    tr = gth_forward(random_chain(n, seed))
    for k in range(1, n + 1):
        assert validate_stochastic(tr.level(k), 1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), seeds)
def test_denominators_are_explicit_partial_sums(n, seed):
    tr = gth_forward(random_chain(n, seed))
    for k in range(2, n + 1):
        s = math.fsum(tr.level(k)[k - 1, : k - 1])
        assert tr.denominators[k - 1] > 0
        assert abs(tr.denominators[k - 1] - s) <= 1e-15 * s


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 200), seeds)
def test_fixed_point_residual(n, seed):
    p = random_chain(n, seed)
    pi = gth_solve(p)
    assert np.abs(pi - pi @ p).sum() <= 1e-12 * n
    assert abs(pi.sum() - 1) <= 1e-14


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 50), seeds)
def test_agrees_with_power_iteration(n, seed):
    p = random_chain(n, seed)
    # lazy chain: same stationary vector, guaranteed aperiodic
    v = power_iteration_oracle((p + np.eye(n)) / 2, tol=1e-13)
    assert np.abs(gth_solve(p) - v).sum() <= 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 50), seeds)
def test_agrees_with_rational_oracle(n, seed):
    r = random_rational_chain(n, seed)
    assert max_relative_error(gth_solve(to_float(r)), rational_solve_oracle(r)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), seeds)
def test_ratio_scale_invariance(n, seed):
    p = random_chain(n, seed)
    r = gth_back_substitute(gth_forward(p))
    pi = gth_solve(p)
    assert r[0] == 1.0
    np.testing.assert_allclose(r, pi / pi[0], rtol=1e-12)
