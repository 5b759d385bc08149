"""Relation-specific validation prompts.

Four relations get dedicated framings (certificate use, network
connectivity, vulnerability applicability, cloud/VPN dependency); every
other relation falls back to a generic framing marked as such. All prompts
ask for post-quantum-aware reasoning and a machine-parseable verdict.
"""

from __future__ import annotations

from ..graph import AssetGraph, DependencyEdge, Relation

PREAMBLE = "You are a cybersecurity expert analyzing infrastructure dependencies."

ANSWER_FORMAT = (
    "Respond with valid=true/false and confidence (0-1). "
    'Reply with a single JSON object: {"valid": true|false, "confidence": 0.0-1.0, "reasoning": "..."}.'
)

PQ_AWARENESS = (
    "Consider cryptographic algorithm choices, key sizes, and quantum "
    "vulnerability timelines explicitly."
)


def _attr(graph: AssetGraph, node_id: str, key: str, default: str = "unknown") -> str:
    node = graph.nodes.get(node_id)
    if node is None:
        return default
    value = node.attributes.get(key, "")
    return str(value) if value else default


def render_prompt(edge: DependencyEdge, graph: AssetGraph) -> str:
    src, dst = edge.source, edge.target
    src_label = graph.nodes[src].label or src if src in graph.nodes else src
    dst_label = graph.nodes[dst].label or dst if dst in graph.nodes else dst

    if edge.relation is Relation.USES:
        body = (
            f"Evaluate whether this relationship is technically valid: "
            f"[Asset FQDN: {src_label}] USES "
            f"[Certificate fingerprint: {_attr(graph, dst, 'cert_sha256')}, "
            f"algorithm: {_attr(graph, dst, 'algorithm')}, "
            f"key_size: {_attr(graph, dst, 'key_size')}]. "
            f"Assess whether the asset legitimately relies on this certificate for "
            f"secure communications, considering algorithm appropriateness and "
            f"enterprise deployment patterns."
        )
    elif edge.relation is Relation.CONNECTS_TO:
        body = (
            f"Evaluate network connectivity plausibility: "
            f"[Asset: {src_label}, services: {_attr(graph, src, 'services', 'none')}] "
            f"CONNECTS_TO [Asset: {dst_label}, services: {_attr(graph, dst, 'services', 'none')}, "
            f"ports: {_attr(graph, dst, 'ports', 'none')}]. "
            f"Judge based on service types, port configurations, and typical "
            f"enterprise architectures."
        )
    elif edge.relation is Relation.EXPOSES:
        body = (
            f"Verify vulnerability applicability: [Asset: {src_label}, "
            f"stack: {_attr(graph, src, 'software', 'unknown')}] EXPOSES "
            f"[{dst_label}]. Match the asset technology stack to affected software "
            f"versions and the CVE applicability statement."
        )
    elif edge.relation is Relation.DEPENDS_ON:
        body = (
            f"Analyze this dependency: [Asset: {src_label}] DEPENDS_ON "
            f"[{dst_label}, type: {_attr(graph, dst, 'service_type')}]. "
            f"Determine whether the remote access or cloud provider dependency "
            f"aligns with observed network configurations and service requirements."
        )
    else:
        body = (
            f"[generic framing, relation outside the specialized set] "
            f"Evaluate whether this relationship is technically valid: "
            f"[{src_label}] {edge.relation.value} [{dst_label}]."
        )

    return f"{PREAMBLE} {body} {PQ_AWARENESS} {ANSWER_FORMAT}"
