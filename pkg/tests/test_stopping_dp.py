import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prophet_lab.dist_core import (FiniteDist, dilate, from_pairs, max_power, mean,
                                   point_mass)
from prophet_lab.stopping_dp import (acceptance_probs, batch_value, build_table, competitive_ratio,
                                     fast_ratio, gambler_values, prophet_value, prophet_values)

from conftest import dists
from oracles import game_tree_value, law, prophet_by_enumeration, threshold_values


def test_coin_table(coin):
    t = build_table(coin, 3)
    assert np.allclose(t.gambler_values, [0.5, 0.75, 0.875], atol=1e-15)
    assert np.allclose(t.prophet_values, [0.5, 0.75, 0.875], atol=1e-15)
    assert t.thresholds.tolist() == [0.75, 0.5, 0.0]
    assert competitive_ratio(coin, 3) == 1.0


def test_three_point_table(three_point):
    t = build_table(three_point, 2)
    assert t.V(2) == pytest.approx(2.26, abs=1e-14)
    assert t.E(2) == pytest.approx(2.46, abs=1e-14)
    assert t.ratio == pytest.approx(2.26 / 2.46, abs=1e-15)
    assert round(t.ratio, 6) == 0.918699


@pytest.mark.parametrize("n", [1, 2, 7])
def test_constant_distribution(n):
    t = build_table(point_mass(3.5), n)
    assert np.all(t.gambler_values == 3.5) and np.all(t.prophet_values == 3.5)


def test_all_zero_has_no_ratio():
    with pytest.raises(ValueError, match="prophet value zero"):
        competitive_ratio(point_mass(0.0), 4)


def test_bad_horizon(coin):
    with pytest.raises(ValueError):
        build_table(coin, 0)


@given(dists(), st.integers(1, 30))
def test_table_invariants(d, n):
    t = build_table(d, n)
    V, E = t.gambler_values, t.prophet_values
    assert V[0] == pytest.approx(mean(d), abs=1e-12)
    assert np.all(np.diff(V) >= -1e-12) and np.all(np.diff(E) >= -1e-12)
    assert np.all(V <= E + 1e-12)
    assert t.thresholds[-1] == 0.0
    if d.max_value > 0:
        r = competitive_ratio(d, n)
        assert 0 < r <= 1 + 1e-12
        assert competitive_ratio(d, 1) == pytest.approx(1.0, abs=1e-15)


@given(dists(max_points=4), st.integers(1, 8))
def test_values_match_plain_recursion_and_enumeration(d, n):
    V = threshold_values(law(d), n)
    assert np.allclose(gambler_values(d, n), V[1:], atol=1e-12)
    if n <= 5:
        assert prophet_value(d, n) == pytest.approx(prophet_by_enumeration(law(d), n), abs=1e-12)


@given(dists(), st.integers(1, 80))
def test_prophet_paths_agree(d, n):
    vals = prophet_values(d, n)
    assert vals[-1] == pytest.approx(mean(max_power(d, n)), abs=1e-11 * max(1, d.max_value))
    assert vals[-1] == pytest.approx(prophet_value(d, n), abs=1e-11 * max(1, d.max_value))


def test_batch_value_examples(coin, three_point):
    assert batch_value(coin, 4, 2) == pytest.approx(0.9375, abs=1e-15)
    assert batch_value(three_point, 6, 6) == pytest.approx(prophet_value(three_point, 6), abs=1e-12)
    assert batch_value(three_point, 6, 1) == pytest.approx(build_table(three_point, 6).V(6), abs=1e-15)
    with pytest.raises(ValueError):
        batch_value(coin, 5, 2)


@given(dists(max_points=3), st.sampled_from([(2, 1), (2, 2), (3, 1), (4, 2), (6, 3), (6, 2), (4, 4)]))
def test_batch_value_matches_game_tree(d, nb):
    n, b = nb
    if n > 4 and d.size == 3 and b == 1:
        return  # keep the tree small
    assert batch_value(d, n, b) == pytest.approx(game_tree_value(law(d), n // b, b), abs=1e-9)


def test_acceptance_probs_examples():
    assert np.allclose(acceptance_probs(from_pairs({0: 0.25, 1: 0.75}), 2), [0.75, 0.75])
    assert acceptance_probs(point_mass(2.0), 2).tolist() == [0.0, 1.0]


@given(dists(), st.integers(1, 20))
def test_acceptance_probs_nondecreasing(d, n):
    q = acceptance_probs(d, n)
    assert np.all(np.diff(q) >= -1e-15)


@given(dists(min_points=2), st.integers(1, 10))
def test_truncating_below_first_value_keeps_values(d, k):
    v1 = mean(d)
    if v1 <= 0:
        return
    # moving the mass below E[X] to {0, E[X]} leaves every V_k unchanged
    assert np.allclose(gambler_values(dilate(d, 0.0, v1), k), gambler_values(d, k), atol=1e-9)


@given(dists(min_points=2), st.integers(1, 300))
def test_fast_ratio_agrees(d, k):
    if d.max_value == 0:
        return
    assert fast_ratio(d.support, d.probs, k) == pytest.approx(competitive_ratio(d, k), abs=1e-9)


def test_fast_ratio_handles_saturated_cdf():
    d = FiniteDist([0.0, 1.0, 2.0], [0.5, 0.5 - 1e-17, 1e-17])
    assert fast_ratio(d.support, d.probs, 50) == pytest.approx(competitive_ratio(d, 50), abs=1e-9)
