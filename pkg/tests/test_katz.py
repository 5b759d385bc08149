"""Spectral radius estimation and the all-walks backend."""

import numpy as np
import pytest
from scipy import sparse

from helpers import edge, graph_of, node
from pqgraph import bench
from pqgraph.config import ScoringConfig, make_context
from pqgraph.katz import KatzScorer, exposure_katz, spectral_radius


class TestSpectralRadius:
    def test_diagonal(self):
        rho, ok = spectral_radius(np.diag([0.1, 0.5, 0.3]))
        assert ok
        assert rho == pytest.approx(0.5, rel=1e-6)

    def test_two_cycle(self):
        # Plain power iteration oscillates here; the shift must not.
        W = np.array([[0.0, 0.4], [0.4, 0.0]])
        rho, ok = spectral_radius(W)
        assert ok
        assert rho == pytest.approx(0.4, rel=1e-6)

    def test_nilpotent_is_exactly_zero(self):
        W = np.zeros((4, 4))
        W[0, 1] = W[1, 2] = W[2, 3] = 0.9
        rho, ok = spectral_radius(W)
        assert ok
        assert rho == 0.0

    def test_empty_matrix(self):
        rho, ok = spectral_radius(sparse.csr_matrix((0, 0)))
        assert ok
        assert rho == 0.0

    def test_stochastic_matrix(self):
        rng = np.random.default_rng(7)
        W = rng.uniform(0, 1, size=(20, 20))
        W /= W.sum(axis=1, keepdims=True)
        rho, ok = spectral_radius(W)
        assert ok
        # Row-stochastic nonnegative matrix has spectral radius exactly 1.
        assert rho == pytest.approx(1.0, rel=1e-6)

    def test_matches_dense_eig(self):
        rng = np.random.default_rng(11)
        W = (rng.random((15, 15)) < 0.3) * rng.uniform(0, 1, size=(15, 15))
        rho, ok = spectral_radius(W)
        want = max(abs(np.linalg.eigvals(W)))
        assert ok
        assert rho == pytest.approx(want, rel=1e-6, abs=1e-9)


class TestKatzScorer:
    def test_chain_is_alpha_squared(self, chain_graph):
        ctx = make_context(chain_graph)
        scorer = KatzScorer(chain_graph, ctx)
        # Acyclic: rho = 0, so alpha = kappa.
        assert scorer.rho == 0.0
        assert scorer.alpha == ctx.config.katz_kappa
        assert scorer.exposure() == pytest.approx(scorer.alpha**2, abs=1e-12)

    def test_explicit_alpha_override(self, chain_graph):
        ctx = make_context(chain_graph)
        assert exposure_katz(chain_graph, ctx, alpha=0.3) == pytest.approx(0.09, abs=1e-12)

    def test_target_attributes_weight_walks(self):
        g = graph_of(
            [
                node("a", r=0.5, w=0.5, domains={"d"}, entry=True),
                node("c", r=0.2, w=0.5, domains={"d"}, impact=1.0),
            ],
            [edge("a", "c", 0.7)],
        )
        ctx = make_context(g)
        scorer = KatzScorer(g, ctx)
        # One walk a->c: alpha * p * (1-R_c) * w_c; entry attributes must not enter.
        want = scorer.alpha * 0.7 * 0.8 * 0.5
        assert scorer.exposure() == pytest.approx(want, abs=1e-12)

    def test_empty_coalition_masks_every_walk(self, chain_graph):
        ctx = make_context(chain_graph)
        scorer = KatzScorer(chain_graph, ctx)
        # All walks blocked: only the zero-step term a.b survives.
        assert scorer.exposure(frozenset()) == pytest.approx(float(scorer.a @ scorer.b))

    def test_entry_crown_overlap_shows_in_empty_coalition(self):
        g = graph_of(
            [
                node("x", domains={"d"}, entry=True, impact=0.95, w=1.0),
                node("y", domains={"d"}),
            ],
            [edge("x", "y", 0.5)],
        )
        ctx = make_context(g)
        scorer = KatzScorer(g, ctx)
        assert scorer.exposure(frozenset()) == pytest.approx(0.95)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_series_identity_random_dags(self, seed):
        graph = bench.generate_graph(bench.GenSpec(n=25, density=0.1, seed=seed))
        ctx = make_context(graph)
        scorer = KatzScorer(graph, ctx)
        direct = scorer.exposure()
        series = scorer.series_exposure()
        assert direct == pytest.approx(series, abs=1e-8)

    def test_series_identity_cyclic(self):
        graph = bench.generate_graph(bench.GenSpec(n=20, density=0.15, cyclic=True, seed=5))
        ctx = make_context(graph)
        scorer = KatzScorer(graph, ctx)
        assert scorer.rho is not None
        assert scorer.exposure() == pytest.approx(scorer.series_exposure(), abs=1e-8)

    def test_sub_coalitions_converge_on_cyclic_graphs(self):
        graph = bench.generate_graph(bench.GenSpec(n=15, density=0.2, cyclic=True, seed=9))
        ctx = make_context(graph)
        scorer = KatzScorer(graph, ctx)
        for d in ctx.domains:
            sub = scorer.exposure(frozenset({d}))
            assert np.isfinite(sub)
            # column masking can only remove walk weight
            assert sub <= scorer.exposure() + 1e-9

    def test_kappa_controls_damping(self, chain_graph):
        lo = exposure_katz(chain_graph, make_context(chain_graph, ScoringConfig(mode="katz", katz_kappa=0.2)))
        hi = exposure_katz(chain_graph, make_context(chain_graph, ScoringConfig(mode="katz", katz_kappa=0.8)))
        assert lo == pytest.approx(0.04, abs=1e-12)
        assert hi == pytest.approx(0.64, abs=1e-12)
