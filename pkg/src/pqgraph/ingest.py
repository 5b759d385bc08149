"""Scanner-output ingestion: dedupe, entity resolution, enrichment.

Scan records are JSON objects (one observation per record) carrying exactly
one identity key: ``fqdn``, ``ip``, or ``cert_fingerprint``. Records with
the same canonical identity merge; scalar conflicts resolve to the most
recent observation and are logged, list-valued fields union. DNS-style
address observations become RESOLVES_TO edges (synthesizing IP nodes when
needed), and vulnerability feed records become CVE nodes with EXPOSES
edges weighted by source reliability times normalized severity.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import ValidationError
from .graph import (
    AssetGraph,
    AssetNode,
    DependencyEdge,
    NodeKind,
    Relation,
    build_graph,
)
from .registry import ResistanceRegistry, weakest_link_resistance

log = logging.getLogger(__name__)

CVE_ID = re.compile(r"^CVE-\d{4}-\d{4,}$")

SOURCE_WEIGHTS = {
    "cisa_kev": 1.0,
    "nist_nvd": 0.9,
    "cve_search": 0.8,
}
DEFAULT_SOURCE_WEIGHT = 0.7

_CVSS_ALIASES = {
    "v2": "v2", "2": "v2", "2.0": "v2",
    "v3_0": "v3_0", "v3.0": "v3_0", "3.0": "v3_0",
    "v3_1": "v3_1", "v3.1": "v3_1", "3.1": "v3_1",
}

_SCALAR_FIELDS = (
    "label", "kind", "internet_facing", "business_weight", "crown_impact",
    "resistance", "observed_at", "scanner",
)
# Bookkeeping fields legitimately differ between observations of one asset.
_NO_CONFLICT_LOG = {"observed_at", "scanner"}
_LIST_FIELDS = ("domains", "algorithms", "addresses", "links")


@dataclass(frozen=True)
class VulnRecord:
    cve_id: str
    source: str
    cvss_version: str
    base_score: float
    affected: tuple[str, ...]


@dataclass
class IngestReport:
    records_in: int = 0
    assets: int = 0
    conflicts: list[str] = field(default_factory=list)
    rejected: list[str] = field(default_factory=list)
    orphans: list[str] = field(default_factory=list)
    synthesized_ips: list[str] = field(default_factory=list)
    skipped_links: list[str] = field(default_factory=list)


def canonical_identity(record: dict[str, Any]) -> str | None:
    if record.get("fqdn"):
        return str(record["fqdn"]).strip().lower()
    if record.get("ip"):
        return str(record["ip"]).strip()
    if record.get("cert_fingerprint"):
        return str(record["cert_fingerprint"]).strip().lower()
    return None


def _identity_kind(record: dict[str, Any]) -> NodeKind:
    if record.get("kind"):
        return NodeKind(record["kind"])
    if record.get("fqdn"):
        return NodeKind.ASSET
    if record.get("ip"):
        return NodeKind.IP
    return NodeKind.CERTIFICATE


def dedupe_assets(records: Iterable[dict[str, Any]], report: IngestReport | None = None) -> list[dict[str, Any]]:
    """Merge records sharing a canonical identity; idempotent."""
    report = report if report is not None else IngestReport()
    merged: dict[str, dict[str, Any]] = {}
    order: list[str] = []
    for rec in records:
        identity = canonical_identity(rec)
        if identity is None:
            report.rejected.append(f"record without identity: {json.dumps(rec, sort_keys=True)[:120]}")
            continue
        if identity not in merged:
            base = dict(rec)
            base["_identity"] = identity
            merged[identity] = base
            order.append(identity)
            continue
        current = merged[identity]
        newer = str(rec.get("observed_at", "")) >= str(current.get("observed_at", ""))
        winner, loser = (rec, current) if newer else (current, rec)
        for key in _SCALAR_FIELDS:
            cur_v, new_v = current.get(key), rec.get(key)
            if key not in _NO_CONFLICT_LOG and cur_v is not None and new_v is not None and cur_v != new_v:
                report.conflicts.append(
                    f"{identity}: {key} {cur_v!r} ({current.get('scanner', '?')}) vs "
                    f"{new_v!r} ({rec.get('scanner', '?')}); kept {winner.get(key)!r}"
                )
            if winner.get(key) is not None:
                current[key] = winner[key]
            elif loser.get(key) is not None:
                current[key] = loser[key]
        for key in _LIST_FIELDS:
            seen = {json.dumps(x, sort_keys=True) for x in current.get(key, [])}
            out = list(current.get(key, []))
            for x in rec.get(key, []):
                blob = json.dumps(x, sort_keys=True)
                if blob not in seen:
                    seen.add(blob)
                    out.append(x)
            if out:
                current[key] = out
        attrs = dict(loser.get("attributes", {}))
        attrs.update(winner.get("attributes", {}))
        if attrs:
            current["attributes"] = attrs
    return [merged[i] for i in order]


def _node_from_record(rec: dict[str, Any], registry: ResistanceRegistry) -> AssetNode:
    identity = rec["_identity"]
    resistance = rec.get("resistance")
    if resistance is None:
        algorithms = [str(a) for a in rec.get("algorithms", [])]
        resistance = weakest_link_resistance(algorithms, registry)
    return AssetNode(
        id=identity,
        kind=_identity_kind(rec),
        label=str(rec.get("label", "")) or identity,
        resistance=float(resistance),
        business_weight=float(rec.get("business_weight", 0.0)),
        domains=frozenset(str(d) for d in rec.get("domains", [])),
        crown_impact=float(rec.get("crown_impact", 0.0)),
        is_entry=bool(rec.get("internet_facing", False)),
        algorithms=tuple(str(a) for a in rec.get("algorithms", [])),
        attributes={str(k): str(v) for k, v in rec.get("attributes", {}).items()},
    )


def resolve_entities(
    records: list[dict[str, Any]],
    nodes: dict[str, AssetNode],
    report: IngestReport,
) -> list[DependencyEdge]:
    """RESOLVES_TO edges for address observations, closing over missing IPs."""
    edges = []
    for rec in records:
        if not rec.get("fqdn"):
            continue
        identity = rec["_identity"]
        for addr in rec.get("addresses", []):
            # scanners emit either bare strings or {"ip": ..., "confidence": ...}
            if isinstance(addr, str):
                addr = {"ip": addr}
            ip = str(addr.get("ip", "")).strip()
            if not ip:
                continue
            if ip not in nodes:
                nodes[ip] = AssetNode(id=ip, kind=NodeKind.IP, label=ip)
                report.synthesized_ips.append(ip)
            confidence = float(addr.get("confidence", 1.0))
            edges.append(DependencyEdge(identity, ip, Relation.RESOLVES_TO, confidence))
    return edges


def _link_edges(
    records: list[dict[str, Any]],
    nodes: dict[str, AssetNode],
    report: IngestReport,
) -> list[DependencyEdge]:
    edges = []
    for rec in records:
        identity = rec["_identity"]
        for link in rec.get("links", []):
            target = str(link.get("target", "")).strip().lower()
            if not target:
                continue
            if target not in nodes:
                report.skipped_links.append(f"{identity} -> {target}: unknown target")
                continue
            try:
                relation = Relation(link.get("relation", "CONNECTS_TO"))
            except ValueError:
                report.skipped_links.append(f"{identity} -> {target}: unknown relation {link.get('relation')!r}")
                continue
            edges.append(
                DependencyEdge(identity, target, relation, float(link.get("confidence", 0.5)))
            )
    return edges


def normalize_cvss(record: VulnRecord) -> float:
    """Severity in [0,1]: base/10, the same linear map for every version."""
    if not (0.0 <= record.base_score <= 10.0):
        raise ValidationError(f"{record.cve_id}: base_score {record.base_score} outside [0, 10]")
    return record.base_score / 10.0


def weight_source(source: str) -> float:
    return SOURCE_WEIGHTS.get(source, DEFAULT_SOURCE_WEIGHT)


def parse_vuln_feed(text: str, report: IngestReport | None = None) -> list[VulnRecord]:
    """Record-per-line JSON feed; malformed lines are rejected, not fatal."""
    report = report if report is not None else IngestReport()
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            report.rejected.append(f"vuln feed line {lineno}: not JSON ({exc.msg})")
            continue
        cve_id = str(obj.get("cve_id", "")).upper()
        if not CVE_ID.match(cve_id):
            report.rejected.append(f"vuln feed line {lineno}: bad cve_id {obj.get('cve_id')!r}")
            continue
        version = _CVSS_ALIASES.get(str(obj.get("cvss_version", "")).lower())
        if version is None:
            report.rejected.append(f"vuln feed line {lineno}: unknown cvss_version {obj.get('cvss_version')!r}")
            continue
        try:
            score = float(obj.get("base_score"))
        except (TypeError, ValueError):
            report.rejected.append(f"vuln feed line {lineno}: missing base_score")
            continue
        record = VulnRecord(
            cve_id=cve_id,
            source=str(obj.get("source", "local")),
            cvss_version=version,
            base_score=score,
            affected=tuple(str(a).strip().lower() for a in obj.get("affected", [])),
        )
        try:
            normalize_cvss(record)
        except ValidationError as exc:
            report.rejected.append(f"vuln feed line {lineno}: {exc}")
            continue
        out.append(record)
    return out


def enrich(
    nodes: dict[str, AssetNode],
    vulns: list[VulnRecord],
    report: IngestReport,
) -> list[DependencyEdge]:
    """CVE nodes plus EXPOSES edges; per CVE the strongest evidence wins."""
    best: dict[str, tuple[float, VulnRecord]] = {}
    for v in vulns:
        weight = weight_source(v.source) * normalize_cvss(v)
        prev = best.get(v.cve_id)
        if prev is None or weight > prev[0]:
            best[v.cve_id] = (weight, v)

    edges = []
    for cve_id in sorted(best):
        weight, v = best[cve_id]
        matched = [a for a in v.affected if a in nodes]
        if not matched:
            report.orphans.append(f"{cve_id}: no matching asset among {list(v.affected)!r}")
            continue
        node_id = cve_id.lower()
        if node_id not in nodes:
            nodes[node_id] = AssetNode(id=node_id, kind=NodeKind.CVE, label=cve_id)
        for target in matched:
            edges.append(
                DependencyEdge(target, node_id, Relation.EXPOSES, weight, provenance=f"vuln:{v.source}")
            )
    return edges


def ingest(
    scan_records: Iterable[dict[str, Any]],
    vuln_feed: str = "",
    registry: ResistanceRegistry | None = None,
) -> tuple[AssetGraph, IngestReport]:
    """Full ETL: dedupe, nodes, entity resolution, links, enrichment."""
    registry = registry or ResistanceRegistry.default()
    report = IngestReport()
    records = list(scan_records)
    report.records_in = len(records)
    deduped = dedupe_assets(records, report)

    nodes = {rec["_identity"]: _node_from_record(rec, registry) for rec in deduped}
    edges = resolve_entities(deduped, nodes, report)
    edges.extend(_link_edges(deduped, nodes, report))
    if vuln_feed:
        vulns = parse_vuln_feed(vuln_feed, report)
        edges.extend(enrich(nodes, vulns, report))
    report.assets = len(nodes)
    for conflict in report.conflicts:
        log.info("ingest conflict: %s", conflict)
    return build_graph(nodes.values(), edges), report
