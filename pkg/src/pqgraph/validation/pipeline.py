"""Vote aggregation, routing, and the queue-draining scheduler.

Routing order per item: auto-approve short-circuits first (before any LLM
traffic, by design: high-confidence relation rules exist to spend zero
inference budget), then the three disagreement conditions route to human
review, then the LLM majority stance decides. Cached outcomes for an edge
identity under the same settings are reused without new LLM calls.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Any, Callable

from ..errors import EndpointUnavailableError
from ..graph import AssetGraph, DependencyEdge, Relation, ValidationStatus
from .llm import LlmClient
from .models import ValidationItem, ValidationSettings, Verdict
from .rules import rule_validate
from .store import Store

log = logging.getLogger(__name__)

BACKOFF_BASE_SECONDS = 5.0
BACKOFF_CAP_SECONDS = 300.0

_VPN_CLOUD_TYPES = ("vpn", "cloud")

_FINAL_TO_EDGE_STATUS = {
    "auto_approved": ValidationStatus.AUTO_APPROVED,
    "approved": ValidationStatus.LLM_APPROVED,
    "rejected": ValidationStatus.REJECTED,
    "needs_review": ValidationStatus.UNDER_REVIEW,
}


def backoff_delay(attempts: int) -> float:
    return min(BACKOFF_CAP_SECONDS, BACKOFF_BASE_SECONDS * (2 ** max(0, attempts - 1)))


def edge_status_for_final(final: str) -> ValidationStatus:
    return _FINAL_TO_EDGE_STATUS[final]


def relation_threshold(edge: DependencyEdge, graph: AssetGraph, settings: ValidationSettings) -> float:
    """0.7 for VPN/cloud links, 0.5 for general edges.

    VPN and cloud semantics live on the endpoint's service_type attribute;
    either endpoint qualifying applies the stricter bar.
    """
    for nid in (edge.source, edge.target):
        node = graph.nodes.get(nid)
        if node and node.attributes.get("service_type", "").lower() in _VPN_CLOUD_TYPES:
            return settings.threshold_vpn_cloud
    return settings.threshold_general


def auto_approve_matches(edge: DependencyEdge, settings: ValidationSettings) -> bool:
    for relation, min_p in settings.auto_approve_rules:
        if edge.relation.value == relation and edge.exploitability > min_p:
            return True
    return False


def _critical_endpoint(edge: DependencyEdge, graph: AssetGraph, settings: ValidationSettings) -> str | None:
    for nid in (edge.source, edge.target):
        node = graph.nodes.get(nid)
        if node is None:
            continue
        if node.business_weight > settings.crown_review_weight:
            return f"endpoint {nid} is high-criticality (w={node.business_weight:.2f})"
        if node.crown_impact > settings.crown_review_impact:
            return f"endpoint {nid} is a crown jewel (impact={node.crown_impact:.2f})"
    return None


@dataclass(frozen=True)
class AggregateOutcome:
    final: str
    routed_reason: str
    llm_stance: bool
    llm_confidence: float


def aggregate(
    llm_verdicts: list[Verdict],
    rule_verdict: Verdict,
    edge: DependencyEdge,
    settings: ValidationSettings,
    graph: AssetGraph,
) -> AggregateOutcome:
    """Combine votes into a final state; assumes auto-approve already ran."""
    valid_votes = sum(1 for v in llm_verdicts if v.valid)
    stance = valid_votes * 2 > len(llm_verdicts)
    majority = [v for v in llm_verdicts if v.valid == stance]
    confidence = sum(v.confidence for v in majority) / len(majority) if majority else 0.0

    reasons = []
    threshold = relation_threshold(edge, graph, settings)
    if confidence < threshold:
        reasons.append(f"confidence {confidence:.2f} below threshold {threshold:.2f}")
    if stance != rule_verdict.valid:
        reasons.append(
            f"llm says {'keep' if stance else 'remove'}, rule says "
            f"{'keep' if rule_verdict.valid else 'remove'}"
        )
    critical = _critical_endpoint(edge, graph, settings)
    if critical:
        reasons.append(critical)

    if reasons:
        return AggregateOutcome("needs_review", "; ".join(reasons), stance, confidence)
    return AggregateOutcome("approved" if stance else "rejected", "", stance, confidence)


def enqueue_unvalidated(store: Store, graph: AssetGraph, graph_version: str = "") -> int:
    """Queue every unvalidated active edge of a graph version."""
    added = 0
    for e in graph.edges:
        if e.validation_status is ValidationStatus.UNVALIDATED:
            if store.enqueue_edge(e.source, e.target, e.relation.value, graph_version):
                added += 1
    return added


def _find_edge(graph: AssetGraph, item: ValidationItem) -> DependencyEdge | None:
    for e in graph.edges:
        if (e.source, e.target, e.relation.value) == item.edge_identity:
            return e
    return None


def scheduler_tick(
    store: Store,
    graph: AssetGraph,
    graph_version: str = "",
    client: Any | None = None,
    now: float | None = None,
    client_factory: Callable[[ValidationSettings], Any] = LlmClient,
) -> int:
    """One scheduler pass: claim due items, validate, route, finalize.

    Settings are re-read from the store every tick, so threshold or model
    changes apply without a restart. Returns the number of items brought to
    completion. Endpoint failures release the item back to pending with
    exponential backoff; any other per-item failure does the same rather
    than halting the batch.
    """
    settings = store.get_settings()
    now = time.time() if now is None else now
    items = store.claim_batch(settings.batch_size, now=now)
    if not items:
        return 0

    own_client = client is None
    if own_client:
        client = client_factory(settings)
    processed = 0
    try:
        for item in items:
            try:
                processed += _process_item(store, graph, graph_version, item, settings, client, now)
            except EndpointUnavailableError as exc:
                log.warning("endpoint unavailable for %s: %s", item.item_id, exc)
                store.release_item(item.item_id, now + backoff_delay(item.attempts + 1))
            except Exception:
                log.exception("validation failed for item %s", item.item_id)
                store.release_item(item.item_id, now + backoff_delay(item.attempts + 1))
    finally:
        if own_client and hasattr(client, "close"):
            client.close()
    return processed


def _process_item(
    store: Store,
    graph: AssetGraph,
    graph_version: str,
    item: ValidationItem,
    settings: ValidationSettings,
    client: Any,
    now: float,
) -> int:
    edge = _find_edge(graph, item)
    if edge is None:
        store.complete_item(item.item_id, "rejected", "edge no longer exists", [], None, now=now)
        return 1

    key = Store.cache_key(item.source, item.target, item.relation, settings.fingerprint())
    cached = store.cache_get(key)
    if cached is not None:
        store.complete_item(
            item.item_id,
            cached["final"],
            cached["routed_reason"],
            cached["llm_verdicts"],
            cached["rule_verdict"],
            now=now,
        )
        if cached["final"] == "needs_review":
            store.add_review(item, cached["routed_reason"], cached["llm_verdicts"], cached["rule_verdict"], graph_version)
        return 1

    if auto_approve_matches(edge, settings):
        reason = f"auto-approve rule for {edge.relation.value}"
        store.complete_item(item.item_id, "auto_approved", reason, [], None, now=now)
        store.cache_put(key, "auto_approved", reason, [], None)
        return 1

    verdicts = client.validate_edge(edge, graph, settings.votes_per_item)
    rule = rule_validate(edge, graph)
    outcome = aggregate(verdicts, rule, edge, settings, graph)
    store.complete_item(item.item_id, outcome.final, outcome.routed_reason, verdicts, rule, now=now)
    store.cache_put(key, outcome.final, outcome.routed_reason, verdicts, rule)
    if outcome.final == "needs_review":
        store.add_review(item, outcome.routed_reason, verdicts, rule, graph_version)
    return 1


def pipeline_stats(store: Store) -> dict[str, Any]:
    """Rates over completed items; None marks rates with no denominator."""
    completed = store.completed_items()
    total = len(completed)
    counts = store.queue_counts()
    if total == 0:
        return {
            "total": 0,
            "pending": counts["pending"],
            "processing": counts["processing"],
            "validity_rate": None,
            "mean_confidence": None,
            "disagreement_rate": None,
        }
    approved = sum(1 for i in completed if i.final in ("auto_approved", "approved"))
    contested = sum(1 for i in completed if i.final == "needs_review")
    confidences = []
    for i in completed:
        if i.llm_verdicts:
            stance_votes = [v for v in i.llm_verdicts if v.valid] or list(i.llm_verdicts)
            confidences.append(sum(v.confidence for v in stance_votes) / len(stance_votes))
    return {
        "total": total,
        "pending": counts["pending"],
        "processing": counts["processing"],
        "validity_rate": approved / total,
        "mean_confidence": sum(confidences) / len(confidences) if confidences else None,
        "disagreement_rate": contested / total,
    }


def apply_review_decisions(graph: AssetGraph, decisions: list[dict[str, Any]]) -> AssetGraph:
    """Materialize human decisions into a successor graph version."""
    from dataclasses import replace as dc_replace

    by_identity = {
        (d["source"], d["target"], d["relation"]): d["decision"] for d in decisions
    }
    edges = []
    for e in graph.edges:
        decision = by_identity.get((e.source, e.target, e.relation.value))
        if decision == "approve":
            edges.append(dc_replace(e, validation_status=ValidationStatus.HUMAN_APPROVED))
        elif decision == "reject":
            edges.append(dc_replace(e, validation_status=ValidationStatus.REJECTED))
        else:
            edges.append(e)
    return graph.replace(edges=edges)


def apply_pipeline_outcomes(graph: AssetGraph, store: Store) -> AssetGraph:
    """Stamp completed (non-review) outcomes onto edge validation statuses."""
    from dataclasses import replace as dc_replace

    finals = {
        (i.source, i.target, i.relation): i.final
        for i in store.completed_items()
        if i.final is not None
    }
    edges = []
    for e in graph.edges:
        final = finals.get((e.source, e.target, e.relation.value))
        if final is not None and e.validation_status is ValidationStatus.UNVALIDATED:
            edges.append(dc_replace(e, validation_status=edge_status_for_final(final)))
        else:
            edges.append(e)
    return graph.replace(edges=edges)
