import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gthchain.core import (
    Partition,
    as_stochastic,
    is_irreducible,
    northwest_corner,
    parse_subset,
    validate_stochastic,
    validate_substochastic,
)
from gthchain.errors import InvalidSubsetError, NotStochasticError
from gthchain.families import birth_death, random_chain, reset_walk


def test_validate_symmetric_two_state():
    assert validate_stochastic([[0.5, 0.5], [0.5, 0.5]], 1e-12)


def test_validate_reports_short_row():
    res = validate_stochastic([[0.5, 0.4], [0.5, 0.5]])
    assert not res
    assert res.row == 1
    assert res.deviation == pytest.approx(-0.1)
    assert "sums to 0.9" in res.message


def test_validate_one_state():
    assert validate_stochastic([[1.0]])


def test_validate_rejects_out_of_range_entries():
    res = validate_stochastic([[1.5, -0.5], [0.5, 0.5]])
    assert not res and res.row == 1


def test_substochastic_allows_deficit_but_not_excess():
    assert validate_substochastic([[0.7, 0.3], [0.7, 0.0]])
    assert not validate_substochastic([[0.7, 0.4], [0.7, 0.0]])


def test_as_stochastic_normalize_flag():
    with pytest.raises(NotStochasticError):
        as_stochastic([[1.0, 1.0], [0.5, 0.5]])
    np.testing.assert_allclose(as_stochastic([[1.0, 1.0], [0.5, 0.5]], normalize=True), 0.5)


@pytest.mark.parametrize(
    "m, expected",
    [
        ([[0, 1], [1, 0]], True),
        ([[1, 0], [0.5, 0.5]], False),
        (np.roll(np.eye(5), 1, axis=1), True),
        ([[1.0]], True),
    ],
)
def test_is_irreducible(m, expected):
    assert is_irreducible(np.asarray(m, dtype=float)) is expected


def test_partition_and_subset_syntax():
    part = parse_subset("E=2,4", 5)
    assert part.census == (2, 4) and part.complement == (1, 3, 5)
    assert parse_subset("E=1..3", 4).census == (1, 2, 3)
    assert parse_subset("1..2,4", 4).census == (1, 2, 4)
    for bad in ("E=", "E=0,1", "E=1,1", "E=x"):
        with pytest.raises(InvalidSubsetError):
            parse_subset(bad, 3)
    assert Partition.leading(3, 3).complement == ()


def test_northwest_corner_birth_death():
    np.testing.assert_array_equal(northwest_corner(birth_death(0.3), 2), [[0.7, 0.3], [0.7, 0.0]])
    assert northwest_corner(birth_death(0.3), 1).tolist() == [[0.7]]


def test_northwest_corner_row_sums():
    t = northwest_corner(birth_death(0.3), 5)
    sums = t.sum(axis=1)
    np.testing.assert_allclose(sums[:-1], 1.0, atol=1e-15)
    assert sums[-1] < 1
    assert sums[-1] == pytest.approx(0.7)


@pytest.mark.parametrize("p", [0.2, 0.3, 0.45])
def test_birth_death_detailed_balance(p):
    spec = birth_death(p)
    pi = spec.exact_stationary
    for i in range(1, 200):
        assert abs(pi(i) * spec.kernel(i, i + 1) - pi(i + 1) * spec.kernel(i + 1, i)) <= 1e-12
    assert abs(sum(pi(j) for j in range(1, 20)) + spec.tail(19) - 1) <= 1e-12


@pytest.mark.parametrize("p, q", [(0.3, 0.5), (0.45, 0.45), (0.2, 0.0)])
def test_reset_walk_stationary_equations(p, q):
    spec = reset_walk(p, q)
    M = 400
    pi = spec.stationary_vector(M)
    inflow = np.zeros(M)
    for i in range(1, M + 1):
        for j, pij in spec.row(i).items():
            if j <= M:
                inflow[j - 1] += pi[i - 1] * pij
    # state 1 also collects resets from beyond M; that missing mass is below the tail
    assert np.abs(inflow[:50] - pi[:50]).max() <= 1e-12
    assert abs(pi.sum() + spec.tail(M) - 1) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(0, 10_000))
def test_random_family_rows_sum_to_one(n, seed):
    m = random_chain(n, seed)
    assert np.abs(m.sum(axis=1) - 1).max() <= 1e-12
    assert is_irreducible(m)
