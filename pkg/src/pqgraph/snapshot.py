"""Snapshot documents: the serialized carrier for graph versions.

A snapshot is a canonical JSON document: sorted keys, two-space indent, one
trailing newline. Canonical bytes give bit-identical serialization for equal
content, which the versioned store and the determinism guarantees lean on.
Node and edge records are kept as plain dicts so unknown fields written by
other tools survive a parse/serialize round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import ParseError
from .graph import (
    AssetGraph,
    AssetNode,
    DependencyEdge,
    NodeKind,
    Relation,
    ValidationStatus,
    build_graph,
)

FORMAT_VERSION = "1"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class SnapshotDocument:
    generated_at: str
    nodes: list[dict[str, Any]] = field(default_factory=list)
    edges: list[dict[str, Any]] = field(default_factory=list)
    provenance: dict[str, Any] = field(default_factory=dict)
    format_version: str = FORMAT_VERSION
    extra: dict[str, Any] = field(default_factory=dict)

    def to_obj(self) -> dict[str, Any]:
        obj = dict(self.extra)
        obj.update(
            {
                "format_version": self.format_version,
                "generated_at": self.generated_at,
                "nodes": sorted(self.nodes, key=lambda r: str(r.get("id", ""))),
                "edges": sorted(
                    self.edges,
                    key=lambda r: (
                        str(r.get("source", "")),
                        str(r.get("target", "")),
                        str(r.get("relation", "")),
                    ),
                ),
                "provenance": self.provenance,
            }
        )
        return obj


def serialize_snapshot(doc: SnapshotDocument) -> bytes:
    return canonical_json(doc.to_obj()).encode("utf-8")


def parse_snapshot(raw: bytes | str) -> SnapshotDocument:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"snapshot is not valid UTF-8: {exc}") from None
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"snapshot is not valid JSON: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("snapshot root must be an object")
    if "format_version" not in obj:
        raise ParseError("snapshot is missing required field 'format_version'")
    version = obj["format_version"]
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported snapshot format_version {version!r}")
    for key, kind in (("nodes", list), ("edges", list)):
        if key in obj and not isinstance(obj[key], kind):
            raise ParseError(f"snapshot field {key!r} must be a {kind.__name__}")
    known = {"format_version", "generated_at", "nodes", "edges", "provenance"}
    return SnapshotDocument(
        generated_at=str(obj.get("generated_at", "")),
        nodes=list(obj.get("nodes", [])),
        edges=list(obj.get("edges", [])),
        provenance=dict(obj.get("provenance", {})),
        format_version=version,
        extra={k: v for k, v in obj.items() if k not in known},
    )


def node_record(node: AssetNode) -> dict[str, Any]:
    rec: dict[str, Any] = {
        "id": node.id,
        "kind": node.kind.value,
        "resistance": node.resistance,
        "business_weight": node.business_weight,
        "domains": sorted(node.domains),
        "crown_impact": node.crown_impact,
        "is_entry": node.is_entry,
    }
    if node.label:
        rec["label"] = node.label
    if node.algorithms:
        rec["algorithms"] = list(node.algorithms)
    if node.attributes:
        rec["attributes"] = dict(node.attributes)
    return rec


def edge_record(edge: DependencyEdge) -> dict[str, Any]:
    rec: dict[str, Any] = {
        "source": edge.source,
        "target": edge.target,
        "relation": edge.relation.value,
        "exploitability": edge.exploitability,
        "validation_status": edge.validation_status.value,
    }
    if edge.provenance:
        rec["provenance"] = edge.provenance
    return rec


def _node_from_record(rec: dict[str, Any]) -> AssetNode:
    try:
        return AssetNode(
            id=str(rec["id"]),
            kind=NodeKind(rec.get("kind", "asset")),
            label=str(rec.get("label", "")),
            resistance=float(rec.get("resistance", 0.0)),
            business_weight=float(rec.get("business_weight", 0.0)),
            domains=frozenset(rec.get("domains", ())),
            crown_impact=float(rec.get("crown_impact", 0.0)),
            is_entry=bool(rec.get("is_entry", False)),
            algorithms=tuple(rec.get("algorithms", ())),
            attributes=dict(rec.get("attributes", {})),
        )
    except KeyError as exc:
        raise ParseError(f"node record missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ParseError(f"bad node record {rec.get('id', '?')!r}: {exc}") from None


def _edge_from_record(rec: dict[str, Any]) -> DependencyEdge:
    try:
        return DependencyEdge(
            source=str(rec["source"]),
            target=str(rec["target"]),
            relation=Relation(rec["relation"]),
            exploitability=float(rec.get("exploitability", 0.0)),
            validation_status=ValidationStatus(rec.get("validation_status", "unvalidated")),
            provenance=str(rec.get("provenance", "")),
        )
    except KeyError as exc:
        raise ParseError(f"edge record missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ParseError(
            f"bad edge record {rec.get('source', '?')}->{rec.get('target', '?')}: {exc}"
        ) from None


def to_graph(doc: SnapshotDocument) -> AssetGraph:
    nodes = [_node_from_record(r) for r in doc.nodes]
    edges = [_edge_from_record(r) for r in doc.edges]
    return build_graph(nodes, edges)


def from_graph(graph: AssetGraph, generated_at: str, provenance: dict[str, Any] | None = None) -> SnapshotDocument:
    return SnapshotDocument(
        generated_at=generated_at,
        nodes=[node_record(n) for n in graph.nodes.values()],
        edges=[edge_record(e) for e in graph.edges],
        provenance=provenance or {},
    )
