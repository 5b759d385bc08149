"""Scoring facade: backend dispatch, normalization, PQRI, deltas, reports.

Raw exposure comes from one of two backends: exhaustive path enumeration
(exact) or the all-walks resolvent (katz), with "auto" switching to katz
above a node-count threshold. Normalization rescales by the exposure of the
same graph with every resistance zeroed, computed by the same backend and
the same damping-factor policy, so the normalized value answers "what share
of the worst case remains".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .config import Coalition, ScoringConfig, ScoringContext, make_context
from .errors import ConfigurationError
from .graph import AssetGraph
from .katz import KatzScorer
from .paths import ExactScorer
from .shapley import AttributionResult, attribute_values

TOP_PATHS_CAP = 20


def make_scorer(graph: AssetGraph, ctx: ScoringContext, mode: str | None = None):
    resolved = mode or ctx.config.resolved_mode(len(graph))
    if resolved == "exact":
        return ExactScorer(graph, ctx)
    if resolved == "katz":
        return KatzScorer(graph, ctx)
    raise ConfigurationError(f"unknown backend {resolved!r}")


def exposure(
    graph: AssetGraph,
    coalition: Coalition | None = None,
    config: ScoringConfig | None = None,
    ctx: ScoringContext | None = None,
) -> float:
    ctx = ctx or make_context(graph, config)
    scorer = make_scorer(graph, ctx)
    return scorer.exposure(coalition if coalition is not None else ctx.full_coalition)


def normalize_value(e: float, e_max: float) -> float:
    """E / E_max clamped to [0, 1]; a zero ceiling normalizes to 0."""
    if e_max == 0.0:
        return 0.0
    return min(1.0, max(0.0, e / e_max))


def exposure_ceiling(graph: AssetGraph, ctx: ScoringContext, mode: str) -> float:
    """Worst-case exposure: every node fully vulnerable, same backend.

    The katz route recomputes its damping factor on the zeroed graph;
    reusing the base-graph factor can put the zeroed-graph walk series
    outside its convergence region.
    """
    zeroed = graph.with_zero_resistance()
    if mode == "exact":
        return ExactScorer(zeroed, ctx).exposure(ctx.full_coalition)
    return KatzScorer(zeroed, ctx).exposure(ctx.full_coalition)


def normalize(e: float, graph: AssetGraph, ctx: ScoringContext, mode: str | None = None) -> tuple[float, float]:
    resolved = mode or ctx.config.resolved_mode(len(graph))
    e_max = exposure_ceiling(graph, ctx, resolved)
    return normalize_value(e, e_max), e_max


def pqri(e_hat_full: float) -> float:
    return 100.0 * (1.0 - e_hat_full)


@dataclass(frozen=True)
class ReadinessDelta:
    value: float
    newly_exposed: bool

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "newly_exposed": self.newly_exposed}


def readiness_delta(e_hat_t: float, e_hat_t0: float) -> ReadinessDelta:
    """Relative exposure change against a baseline scoring run.

    A zero baseline cannot anchor a ratio: the delta is 0 when exposure is
    still 0 and flagged newly exposed when exposure appeared from nothing.
    """
    if e_hat_t0 == 0.0:
        return ReadinessDelta(0.0, e_hat_t > 0.0)
    return ReadinessDelta((e_hat_t - e_hat_t0) / e_hat_t0, False)


@dataclass(frozen=True)
class ExposureReport:
    raw: float
    normalized: float
    exposure_max: float
    pqri: float
    mode: str
    alpha: float | None
    top_paths: tuple[dict[str, Any], ...]
    attribution: AttributionResult | None
    domains: tuple[str, ...]
    n_nodes: int
    n_paths: int | None

    def to_dict(self) -> dict[str, Any]:
        att = None
        if self.attribution is not None:
            a = self.attribution
            att = {
                "phi": dict(sorted(a.phi.items())),
                "normalized_phi": dict(sorted(a.normalized_phi.items())),
                "method": a.method,
                "efficiency_gap": a.efficiency_gap,
                "grand_value": a.grand_value,
                "empty_value": a.empty_value,
                "empty_overlap_flagged": a.empty_overlap_flagged,
                "permutations_sampled": a.permutations_sampled,
                "standard_errors": dict(sorted(a.standard_errors.items()))
                if a.standard_errors is not None
                else None,
            }
        return {
            "raw_exposure": self.raw,
            "normalized_exposure": self.normalized,
            "exposure_max": self.exposure_max,
            "pqri": self.pqri,
            "mode": self.mode,
            "alpha": self.alpha,
            "top_paths": list(self.top_paths),
            "attribution": att,
            "domains": list(self.domains),
            "n_nodes": self.n_nodes,
            "n_paths": self.n_paths,
        }


def score_report(
    graph: AssetGraph,
    config: ScoringConfig | None = None,
    ctx: ScoringContext | None = None,
    attribution_method: str = "auto",
    permutations: int | None = None,
    seed: int = 0,
) -> ExposureReport:
    """Full scoring pass: exposure, normalization, PQRI, attribution, paths.

    Deterministic: the same graph, config, and seed produce an identical
    report, including the Monte Carlo attribution route.
    """
    ctx = ctx or make_context(graph, config)
    mode = ctx.config.resolved_mode(len(graph))
    scorer = make_scorer(graph, ctx, mode)
    alpha = scorer.alpha if isinstance(scorer, KatzScorer) else None

    e_full = scorer.exposure(ctx.full_coalition)
    e_hat, e_max = normalize(e_full, graph, ctx, mode)

    attribution = None
    if ctx.domains:
        attribution = attribute_values(
            ctx.domains,
            scorer.exposure,
            e_hat,
            method=attribution_method,
            permutations=permutations,
            seed=seed,
        )

    top_paths: tuple[dict[str, Any], ...] = ()
    n_paths = None
    if mode == "exact":
        n_paths = scorer.n_paths
        top_paths = tuple(
            {"nodes": list(p.nodes), "crown": p.crown, "probability": prob}
            for p, prob in scorer.top_paths(ctx.full_coalition, TOP_PATHS_CAP)
        )

    return ExposureReport(
        raw=e_full,
        normalized=e_hat,
        exposure_max=e_max,
        pqri=pqri(e_hat),
        mode=mode,
        alpha=alpha,
        top_paths=top_paths,
        attribution=attribution,
        domains=ctx.domains,
        n_nodes=len(graph),
        n_paths=n_paths,
    )
