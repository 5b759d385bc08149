"""Deterministic rule-based edge validator.

Cheap per-relation heuristics that run beside the LLM votes; a stance
conflict between the two routes the edge to a human.
"""

from __future__ import annotations

from ..graph import AssetGraph, DependencyEdge, NodeKind, Relation
from .models import Verdict

PASS_CONFIDENCE = 0.8
FAIL_CONFIDENCE = 0.6


def _label_suffix_match(cert_label: str, asset_label: str) -> bool:
    # "*.example.com" and "example.com" both cover "api.example.com".
    suffix = cert_label.lstrip("*").lstrip(".").lower()
    asset = asset_label.lower()
    return bool(suffix) and (asset == suffix or asset.endswith("." + suffix) or asset.endswith(suffix))


def rule_validate(edge: DependencyEdge, graph: AssetGraph) -> Verdict:
    src = graph.nodes.get(edge.source)
    dst = graph.nodes.get(edge.target)
    valid: bool
    why: str

    if edge.relation is Relation.USES:
        cert_label = (dst.label if dst else "") or (dst.id if dst else "")
        asset_label = (src.label if src else "") or (src.id if src else "")
        valid = _label_suffix_match(cert_label, asset_label)
        why = "certificate name covers the asset name" if valid else "certificate name does not match the asset"
    elif edge.relation is Relation.CONNECTS_TO:
        services = dst.attributes.get("services", "") if dst else ""
        valid = bool(services)
        why = "target exposes a service port" if valid else "target exposes no services"
    elif edge.relation is Relation.EXPOSES:
        valid = dst is not None and dst.kind is NodeKind.CVE
        why = "vulnerability matcher hit during enrichment" if valid else "target is not a vulnerability record"
    elif edge.relation is Relation.DEPENDS_ON:
        valid = dst is not None and dst.kind in (NodeKind.SERVICE, NodeKind.ASSET)
        why = "dependency target is a service or asset" if valid else "dependency target kind is implausible"
    elif edge.relation is Relation.RESOLVES_TO:
        valid = edge.exploitability > 0.5
        why = (
            f"resolution observed with probability {edge.exploitability:.2f}"
            if valid
            else f"resolution probability {edge.exploitability:.2f} too low"
        )
    else:
        valid = True
        why = "no rule for this relation; default pass"

    return Verdict(
        valid=valid,
        confidence=PASS_CONFIDENCE if valid else FAIL_CONFIDENCE,
        reasoning=why,
        source="rule",
    )
