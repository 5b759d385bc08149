import math

import pytest

from helpers import edge, graph_of, node
from pqgraph import bench
from pqgraph.config import ScoringConfig, make_context
from pqgraph.exposure import (
    exposure,
    exposure_ceiling,
    normalize,
    normalize_value,
    pqri,
    readiness_delta,
    score_report,
)


def test_normalize_value_clamps():
    assert normalize_value(0.5, 1.0) == 0.5
    assert normalize_value(1.2, 1.0) == 1.0
    assert normalize_value(-0.1, 1.0) == 0.0
    assert normalize_value(0.3, 0.0) == 0.0


def test_pqri_endpoints():
    assert pqri(0.0) == 100.0
    assert pqri(1.0) == 0.0
    assert pqri(0.25) == 75.0


def test_readiness_delta_ratio():
    d = readiness_delta(0.3, 0.2)
    assert d.value == pytest.approx(0.5)
    assert not d.newly_exposed


def test_readiness_delta_zero_baseline():
    still_safe = readiness_delta(0.0, 0.0)
    assert still_safe.value == 0.0
    assert not still_safe.newly_exposed
    appeared = readiness_delta(0.1, 0.0)
    assert appeared.value == 0.0
    assert appeared.newly_exposed


def test_ceiling_removes_resistance_only(one_edge_graph):
    ctx = make_context(one_edge_graph)
    e = exposure(one_edge_graph, ctx=ctx)
    e_max = exposure_ceiling(one_edge_graph, ctx, "exact")
    # with R_c zeroed the single path has probability 0.5
    assert e == pytest.approx(0.25)
    assert e_max == pytest.approx(0.5)
    e_hat, got_max = normalize(e, one_edge_graph, ctx)
    assert got_max == e_max
    assert e_hat == pytest.approx(0.5)


def test_already_worst_case_normalizes_to_one():
    g = graph_of(
        [node("a", r=0.0, domains={"d"}, entry=True),
         node("c", r=0.0, domains={"d"}, impact=0.95)],
        [edge("a", "c", 0.8)],
    )
    ctx = make_context(g)
    e_hat, _ = normalize(exposure(g, ctx=ctx), g, ctx)
    assert e_hat == pytest.approx(1.0)


@pytest.mark.parametrize("mode", ["exact", "katz"])
def test_normalized_bounds_random_graphs(mode):
    for seed in range(6):
        graph = bench.generate_graph(bench.GenSpec(n=18, seed=seed))
        ctx = make_context(graph, ScoringConfig(mode=mode))
        e = exposure(graph, ctx=ctx)
        e_hat, e_max = normalize(e, graph, ctx, mode)
        assert 0.0 <= e_hat <= 1.0
        assert 0.0 <= pqri(e_hat) <= 100.0
        assert math.isfinite(e_max)


class TestScoreReport:
    def test_exact_report_shape(self, diamond_graph):
        report = score_report(diamond_graph, ScoringConfig(mode="exact"))
        assert report.mode == "exact"
        assert report.alpha is None
        assert report.n_paths == 2
        assert len(report.top_paths) == 2
        assert report.attribution is not None
        assert 0.0 <= report.normalized <= 1.0
        assert report.pqri == pytest.approx(100 * (1 - report.normalized))

    def test_katz_report_has_alpha_no_paths(self, diamond_graph):
        report = score_report(diamond_graph, ScoringConfig(mode="katz"))
        assert report.mode == "katz"
        assert report.alpha is not None
        assert report.n_paths is None
        assert report.top_paths == ()

    def test_auto_resolves_by_size(self, diamond_graph):
        report = score_report(diamond_graph, ScoringConfig(mode="auto", auto_threshold=3))
        assert report.mode == "katz"

    def test_report_deterministic_including_mc(self):
        graph = bench.generate_graph(bench.GenSpec(n=16, seed=4))
        cfg = ScoringConfig(mode="exact")
        r1 = score_report(graph, cfg, attribution_method="mc", permutations=150, seed=9)
        r2 = score_report(graph, cfg, attribution_method="mc", permutations=150, seed=9)
        assert r1.to_dict() == r2.to_dict()

    def test_normalized_attribution_sums_to_normalized_exposure(self, diamond_graph):
        report = score_report(diamond_graph, ScoringConfig(mode="exact"))
        att = report.attribution
        # E(empty) = 0 here, so the rescaled shares recover E_hat exactly.
        assert att.empty_value == 0.0
        assert sum(att.normalized_phi.values()) == pytest.approx(report.normalized, abs=1e-9)

    def test_to_dict_is_json_shaped(self, diamond_graph):
        import json

        report = score_report(diamond_graph, ScoringConfig(mode="exact"))
        blob = json.dumps(report.to_dict())
        assert "pqri" in blob
