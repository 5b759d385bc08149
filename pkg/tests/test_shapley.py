"""Exact and sampled Shapley attribution over injected value functions."""

import math

import pytest

from pqgraph.errors import ConfigurationError
from pqgraph.shapley import (
    EXACT_DOMAIN_CAP,
    attribute_values,
    default_permutations,
    normalize_attribution,
    shapley_exact_values,
    shapley_mc_values,
)


def two_domain_fn(coalition):
    # E(empty)=0, E({a})=0.3, E({b})=0.4, E({a,b})=0.6
    table = {
        frozenset(): 0.0,
        frozenset({"a"}): 0.3,
        frozenset({"b"}): 0.4,
        frozenset({"a", "b"}): 0.6,
    }
    return table[coalition]


def test_two_domain_hand_values():
    phi, grand, empty = shapley_exact_values(("a", "b"), two_domain_fn)
    assert phi["a"] == pytest.approx(0.25, abs=1e-15)
    assert phi["b"] == pytest.approx(0.35, abs=1e-15)
    assert grand == 0.6
    assert empty == 0.0


def test_efficiency_identity():
    phi, grand, empty = shapley_exact_values(("a", "b"), two_domain_fn)
    assert sum(phi.values()) == pytest.approx(grand - empty, abs=1e-12)


def test_null_player_gets_zero():
    def fn(c):
        return 0.5 if "real" in c else 0.0

    phi, _, _ = shapley_exact_values(("real", "ghost"), fn)
    assert phi["ghost"] == 0.0
    assert phi["real"] == 0.5


def test_symmetric_players_split_evenly():
    def fn(c):
        return float(len(c)) / 3.0

    phi, _, _ = shapley_exact_values(("x", "y", "z"), fn)
    assert phi["x"] == pytest.approx(phi["y"])
    assert phi["y"] == pytest.approx(phi["z"])
    assert sum(phi.values()) == pytest.approx(1.0)


def test_exact_evaluates_each_coalition_once():
    calls = []

    def fn(c):
        calls.append(c)
        return len(c) * 0.1

    shapley_exact_values(("a", "b", "c"), fn)
    assert len(calls) == 8
    assert len({frozenset(c) for c in calls}) == 8


def test_exact_domain_cap():
    domains = tuple(f"d{i:02d}" for i in range(EXACT_DOMAIN_CAP + 1))
    with pytest.raises(ConfigurationError, match="Monte Carlo"):
        shapley_exact_values(domains, lambda c: 0.0)


def test_empty_domain_set_rejected():
    with pytest.raises(ConfigurationError):
        shapley_exact_values((), lambda c: 0.0)
    with pytest.raises(ConfigurationError):
        shapley_mc_values((), lambda c: 0.0, 100, 0)


class TestMonteCarlo:
    def test_deterministic_per_seed(self):
        a1 = shapley_mc_values(("a", "b"), two_domain_fn, 200, seed=3)
        a2 = shapley_mc_values(("a", "b"), two_domain_fn, 200, seed=3)
        assert a1 == a2

    def test_memoization_bounds_evaluations(self):
        calls = []

        def fn(c):
            calls.append(1)
            return len(c) * 0.1

        shapley_mc_values(("a", "b", "c"), fn, 500, seed=0)
        # 500 permutations touch at most all 8 coalitions once each
        assert len(calls) <= 8

    def test_minimum_permutations_enforced(self):
        with pytest.raises(ConfigurationError):
            shapley_mc_values(("a", "b"), two_domain_fn, 50, 0)

    def test_estimates_near_exact_with_se(self):
        exact, _, _ = shapley_exact_values(("a", "b"), two_domain_fn)
        phi, se, _, _ = shapley_mc_values(("a", "b"), two_domain_fn, 400, seed=1)
        for d in ("a", "b"):
            bound = max(3 * se[d], 1e-12)
            assert abs(phi[d] - exact[d]) <= bound

    def test_se_shrinks_with_more_samples(self):
        def lumpy(c):
            return {frozenset(): 0.0, frozenset({"a"}): 0.9, frozenset({"b"}): 0.1,
                    frozenset({"a", "b"}): 1.0}[c]

        _, se_small, _, _ = shapley_mc_values(("a", "b"), lumpy, 100, seed=0)
        _, se_big, _, _ = shapley_mc_values(("a", "b"), lumpy, 6400, seed=0)
        # 64x the samples should shrink SE roughly 8x; allow slack
        assert se_big["a"] < se_small["a"]


def test_default_permutations_scales_quadratically():
    assert default_permutations(2) == 100  # floor dominates
    assert default_permutations(6) == 360
    assert default_permutations(10) == 1000


def test_normalize_attribution():
    phi = {"a": 0.25, "b": 0.35}
    scaled = normalize_attribution(phi, e_hat_full=0.3, e_full=0.6)
    assert scaled["a"] == pytest.approx(0.125)
    assert scaled["b"] == pytest.approx(0.175)
    assert normalize_attribution(phi, 0.3, 0.0) == {"a": 0.0, "b": 0.0}


class TestAttributeValues:
    def test_auto_picks_exact_when_small(self):
        res = attribute_values(("a", "b"), two_domain_fn, e_hat_full=0.6)
        assert res.method == "exact"
        assert res.efficiency_gap <= 1e-12
        assert res.permutations_sampled is None
        assert res.standard_errors is None

    def test_auto_picks_mc_when_large(self):
        domains = tuple(f"d{i:02d}" for i in range(EXACT_DOMAIN_CAP + 1))
        res = attribute_values(domains, lambda c: len(c) * 0.01, e_hat_full=0.15,
                               permutations=100)
        assert res.method == "monte_carlo"
        assert res.permutations_sampled == 100

    def test_empty_overlap_flag(self):
        def offset(c):
            return 0.2 + 0.1 * len(c)

        res = attribute_values(("a", "b"), offset, e_hat_full=0.4)
        assert res.empty_value == pytest.approx(0.2)
        assert res.empty_overlap_flagged
        # efficiency telescopes against the literal empty value
        assert sum(res.phi.values()) == pytest.approx(res.grand_value - res.empty_value, abs=1e-12)

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigurationError):
            attribute_values(("a",), two_domain_fn, 0.0, method="divination")
