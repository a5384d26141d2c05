import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prophet_lab.dist_core import (DistributionError, FiniteDist, cdf, cdf_power, dilate, dump_dist, from_pairs,
                                   kth_root, kth_root_recursive, load_dist, max_power, mean, parse_inline,
                                   point_mass, quantile_upper, resolve_dist, scale, survival, zero_pad)
from prophet_lab.stopping_dp import competitive_ratio

from conftest import dists
from oracles import enum_max_law, expected_max, law


def close_dist(a, b, tol=1e-12):
    return a.size == b.size and np.allclose(a.support, b.support, atol=tol) and np.allclose(
        a.probs, b.probs, atol=tol, rtol=0)


# -- construction ------------------------------------------------------------

def test_zero_mass_points_removed_and_sorted():
    d = FiniteDist([3.0, 1.0, 2.0], [0.5, 0.5, 0.0])
    assert d.support.tolist() == [1.0, 3.0]
    assert d.probs.tolist() == [0.5, 0.5]


def test_close_points_merge_to_weighted_centre():
    d = FiniteDist([1.0, 1.0 + 1e-13, 5.0], [0.25, 0.25, 0.5])
    assert d.size == 2
    assert abs(d.support[0] - (1.0 + 0.5e-13)) < 1e-15


def test_renormalises_small_drift_and_records_it():
    d = FiniteDist([0.0, 1.0], [0.5, 0.5 + 5e-10])
    assert abs(d.probs.sum() - 1.0) < 1e-15
    assert d.adjustment == pytest.approx(5e-10, rel=1e-3)


@pytest.mark.parametrize("support,probs,msg", [
    ([0.0, 1.0], [0.5, 0.6], "sum"),
    ([-1.0, 1.0], [0.5, 0.5], "negative"),
    ([0.0, math.inf], [0.5, 0.5], "finite"),
    ([0.0, 1.0], [-0.1, 1.1], "nonnegative"),
    ([], [], "empty"),
])
def test_invalid_inputs_rejected(support, probs, msg):
    with pytest.raises(DistributionError, match=msg):
        FiniteDist(support, probs)


def test_immutable(coin):
    with pytest.raises(Exception):
        coin.support[0] = 3.0


# -- mean, cdf, quantiles ---------------------------------------------------------

@pytest.mark.parametrize("d,expected", [
    ({0: 0.5, 1: 0.5}, 0.5),
    ({1: 1.0}, 1.0),
    ({0: 0.5, 1: 0.4, 10: 0.1}, 1.4),
])
def test_mean_examples(d, expected):
    assert mean(from_pairs(d)) == pytest.approx(expected, abs=1e-15)


def test_cdf_and_quantile_examples():
    d = from_pairs({0: 0.25, 1: 0.75})
    assert cdf(d, 0) == 0.25
    assert cdf(d, -1) == 0.0
    assert survival(d, 0) == 0.75
    assert quantile_upper(d, 0.75) == 0.0
    t = from_pairs({0: 0.5, 1: 0.4, 10: 0.1})
    assert quantile_upper(t, 0.05) == 10.0
    assert quantile_upper(t, 1.0) == 0.0
    assert quantile_upper(t, 0.0) == 10.0


def test_quantile_upper_rejects_out_of_range(coin):
    with pytest.raises(DistributionError):
        quantile_upper(coin, 1.5)


@given(dists(), st.lists(st.floats(-1, 25), min_size=2, max_size=10))
def test_cdf_monotone(d, xs):
    xs = sorted(xs)
    vals = [cdf(d, x) for x in xs]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert all(abs(cdf(d, x) + survival(d, x) - 1) < 1e-12 for x in xs)


# -- powers and roots -----------------------------------------------------------------

def test_max_power_examples(coin, three_point):
    assert close_dist(max_power(coin, 2), from_pairs({0: 0.25, 1: 0.75}))
    assert max_power(three_point, 1) is three_point
    assert close_dist(max_power(three_point, 2), from_pairs({0: 0.25, 1: 0.56, 10: 0.19}))


@given(dists(max_points=4), st.integers(1, 4))
def test_max_power_matches_enumeration(d, k):
    ref = enum_max_law(law(d), k)
    got = max_power(d, k).as_dict()
    assert set(ref) == set(got) or all(ref.get(v, 0) < 1e-15 for v in set(ref) ^ set(got))
    for v, p in got.items():
        assert abs(ref[v] - p) < 1e-12


@given(dists(), st.integers(1, 6), st.integers(1, 6))
def test_max_power_composes(d, j, k):
    assert close_dist(max_power(d, j * k), max_power(max_power(d, j), k))


def test_kth_root_examples(three_point):
    assert close_dist(kth_root(from_pairs({0: 0.25, 1: 0.75}), 2), from_pairs({0: 0.5, 1: 0.5}))
    assert kth_root(three_point, 1) is three_point


@given(dists(), st.integers(1, 16))
def test_kth_root_inverts_max_power(d, k):
    assert close_dist(kth_root(max_power(d, k), k), d)
    assert close_dist(max_power(kth_root(d, k), k), d)


@given(dists(), st.integers(1, 16))
def test_kth_root_agrees_with_top_down_recursion(d, k):
    assert close_dist(kth_root(d, k), kth_root_recursive(d, k), tol=1e-11)


def test_cdf_power_keeps_thin_tail_precision():
    d = FiniteDist([0.0, 1.0, 1e6], [1 - 2e-12, 1e-12, 1e-12])
    r = cdf_power(d, 1e-4)
    # P(X' = top) = 1 - (1 - 1e-12)^(1e-4), far below double epsilon relative to 1
    assert r.probs[-1] == pytest.approx(1e-16, rel=1e-6)


def test_power_rejects_bad_exponent(coin):
    with pytest.raises(DistributionError):
        max_power(coin, 0)
    with pytest.raises(DistributionError):
        cdf_power(coin, -1.0)


# -- dilation and padding ---------------------------------------------------------------

def test_dilate_examples(three_point):
    d = from_pairs({0.25: 0.5, 0.75: 0.5})
    assert close_dist(dilate(d, 0, 1), from_pairs({0: 0.5, 1: 0.5}))
    assert dilate(three_point, 2, 5) is three_point


def test_dilate_merges_endpoint_masses():
    d = from_pairs({0: 0.2, 0.5: 0.6, 1: 0.2})
    assert close_dist(dilate(d, 0, 1), from_pairs({0: 0.5, 1: 0.5}))


@given(dists(), st.floats(0, 10), st.floats(0.1, 15))
def test_dilate_preserves_mean(d, a, width):
    assert abs(mean(dilate(d, a, a + width)) - mean(d)) < 1e-12 * max(1.0, mean(d))


@given(dists(max_points=5), dists(max_points=5), st.floats(0, 10), st.floats(0.1, 15))
def test_dilation_never_lowers_expected_max(x, y, a, width):
    before = expected_max(law(x), law(y))
    after = expected_max(law(x), law(dilate(y, a, a + width)))
    assert after >= before - 1e-12


def test_zero_pad_examples(three_point):
    assert close_dist(zero_pad(point_mass(1.0), 0.3), from_pairs({0: 0.7, 1: 0.3}))
    assert zero_pad(three_point, 1) is three_point
    padded = zero_pad(three_point, 0.2)
    assert padded.support[0] == 0.0 and padded.probs[0] == pytest.approx(0.9)


@given(dists(), st.floats(0.01, 1.0))
def test_zero_pad_scales_mean(d, p):
    assert abs(mean(zero_pad(d, p)) - p * mean(d)) < 1e-12


def test_scale_examples():
    assert close_dist(scale(from_pairs({0: 0.5, 2: 0.5}), 0.5), from_pairs({0: 0.5, 1: 0.5}))


@given(dists(min_points=2), st.floats(0.01, 100), st.integers(1, 12))
def test_scale_leaves_ratio_unchanged(d, c, n):
    if d.max_value == 0:
        return
    assert abs(competitive_ratio(scale(d, c), n) - competitive_ratio(d, n)) < 1e-12


# -- i/o -------------------------------------------------------------------------------

def test_json_round_trip(tmp_path, three_point):
    path = tmp_path / "d.json"
    dump_dist(three_point, path, note="x")
    assert load_dist(path) == three_point
    assert json.loads(path.read_text())["note"] == "x"
    assert resolve_dist(str(path)) == three_point


@pytest.mark.parametrize("payload,msg", [
    ({"support": [1, 0], "probs": [0.5, 0.5]}, "ascending"),
    ({"support": [0, 1], "probs": [0.5, 0]}, "positive"),
    ({"support": [0, 1]}, "support"),
    ({"support": [0, 1], "probs": [1.0]}, "equal length"),
])
def test_bad_json_rejected(tmp_path, payload, msg):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(DistributionError, match=msg):
        load_dist(path)


def test_inline_spec():
    assert parse_inline("0:0.5, 1:0.4,10:0.1") == from_pairs({0: 0.5, 1: 0.4, 10: 0.1})
    with pytest.raises(DistributionError):
        parse_inline("0-0.5")
    with pytest.raises(DistributionError):
        resolve_dist("no-such-thing")
