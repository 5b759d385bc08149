"""Scanner-record ETL: identity, dedupe, entity resolution, enrichment."""

import json

import pytest

from pqgraph.errors import ValidationError
from pqgraph.graph import NodeKind, Relation
from pqgraph.ingest import (
    DEFAULT_SOURCE_WEIGHT,
    IngestReport,
    VulnRecord,
    canonical_identity,
    dedupe_assets,
    ingest,
    normalize_cvss,
    parse_vuln_feed,
    weight_source,
)
from pqgraph.registry import ResistanceRegistry


def rec(**kw):
    return dict(kw)


class TestIdentity:
    def test_fqdn_wins_and_lowercases(self):
        r = rec(fqdn="API.Example.COM", ip="10.0.0.1")
        assert canonical_identity(r) == "api.example.com"

    def test_ip_fallback(self):
        assert canonical_identity(rec(ip=" 10.0.0.1 ")) == "10.0.0.1"

    def test_cert_fingerprint_lowercases(self):
        assert canonical_identity(rec(cert_fingerprint="AB:CD")) == "ab:cd"

    def test_no_identity(self):
        assert canonical_identity(rec(label="mystery box")) is None


class TestDedupe:
    def test_merges_by_identity(self):
        out = dedupe_assets([
            rec(fqdn="a.example.com", scanner="s1", observed_at="2026-01-01"),
            rec(fqdn="A.EXAMPLE.COM", scanner="s2", observed_at="2026-01-02"),
            rec(fqdn="b.example.com"),
        ])
        assert len(out) == 2
        assert out[0]["_identity"] == "a.example.com"

    def test_idempotent(self):
        records = [
            rec(fqdn="a.example.com", business_weight=0.4, domains=["tls"]),
            rec(fqdn="a.example.com", business_weight=0.4, domains=["tls", "vpn"]),
        ]
        once = dedupe_assets(records)
        twice = dedupe_assets(once)
        assert once == twice

    def test_most_recent_scalar_wins(self):
        report = IngestReport()
        out = dedupe_assets([
            rec(fqdn="a.example.com", resistance=0.2, scanner="old", observed_at="2026-01-01"),
            rec(fqdn="a.example.com", resistance=0.8, scanner="new", observed_at="2026-03-01"),
        ], report)
        assert out[0]["resistance"] == 0.8
        assert len(report.conflicts) == 1
        assert "resistance" in report.conflicts[0]

    def test_older_record_does_not_overwrite(self):
        out = dedupe_assets([
            rec(fqdn="a.example.com", resistance=0.8, observed_at="2026-03-01"),
            rec(fqdn="a.example.com", resistance=0.2, observed_at="2026-01-01"),
        ])
        assert out[0]["resistance"] == 0.8

    def test_bookkeeping_fields_not_logged_as_conflicts(self):
        report = IngestReport()
        dedupe_assets([
            rec(fqdn="a.example.com", scanner="s1", observed_at="2026-01-01"),
            rec(fqdn="a.example.com", scanner="s2", observed_at="2026-01-02"),
        ], report)
        assert report.conflicts == []

    def test_lists_union_without_duplicates(self):
        out = dedupe_assets([
            rec(fqdn="a.example.com", algorithms=["RSA-2048"], domains=["tls"]),
            rec(fqdn="a.example.com", algorithms=["RSA-2048", "AES-128"], domains=["vpn"]),
        ])
        assert out[0]["algorithms"] == ["RSA-2048", "AES-128"]
        assert out[0]["domains"] == ["tls", "vpn"]

    def test_identityless_record_rejected(self):
        report = IngestReport()
        out = dedupe_assets([rec(label="floating")], report)
        assert out == []
        assert len(report.rejected) == 1

    def test_missing_value_filled_from_either_side(self):
        out = dedupe_assets([
            rec(fqdn="a.example.com", label="web tier", observed_at="2026-01-01"),
            rec(fqdn="a.example.com", business_weight=0.7, observed_at="2026-01-02"),
        ])
        assert out[0]["label"] == "web tier"
        assert out[0]["business_weight"] == 0.7


class TestVulnFeed:
    def test_normalize_cvss_linear(self):
        v = VulnRecord("CVE-2024-0001", "nist_nvd", "v3_1", 7.5, ())
        assert normalize_cvss(v) == 0.75

    def test_normalize_rejects_out_of_range(self):
        v = VulnRecord("CVE-2024-0001", "nist_nvd", "v3_1", 11.0, ())
        with pytest.raises(ValidationError, match="outside"):
            normalize_cvss(v)

    def test_source_weights(self):
        assert weight_source("cisa_kev") == 1.0
        assert weight_source("nist_nvd") == 0.9
        assert weight_source("random_blog") == DEFAULT_SOURCE_WEIGHT

    def test_parse_accepts_version_aliases(self):
        lines = [
            json.dumps({"cve_id": "CVE-2024-1111", "cvss_version": "3.1", "base_score": 5.0}),
            json.dumps({"cve_id": "CVE-2024-2222", "cvss_version": "v2", "base_score": 5.0}),
            json.dumps({"cve_id": "cve-2024-3333", "cvss_version": "V3.0", "base_score": 5.0}),
        ]
        out = parse_vuln_feed("\n".join(lines))
        assert [v.cvss_version for v in out] == ["v3_1", "v2", "v3_0"]
        assert out[2].cve_id == "CVE-2024-3333"

    def test_parse_rejects_bad_lines_individually(self):
        report = IngestReport()
        text = "\n".join([
            "{broken json",
            json.dumps({"cve_id": "NOT-A-CVE", "cvss_version": "v2", "base_score": 5}),
            json.dumps({"cve_id": "CVE-2024-1111", "cvss_version": "v9", "base_score": 5}),
            json.dumps({"cve_id": "CVE-2024-1111", "cvss_version": "v2"}),
            json.dumps({"cve_id": "CVE-2024-1111", "cvss_version": "v2", "base_score": 15}),
            "",
            json.dumps({"cve_id": "CVE-2024-1111", "cvss_version": "v2", "base_score": 5.0}),
        ])
        out = parse_vuln_feed(text, report)
        assert len(out) == 1
        assert len(report.rejected) == 5
        assert any("line 1" in r for r in report.rejected)

    def test_affected_identities_normalized(self):
        out = parse_vuln_feed(json.dumps({
            "cve_id": "CVE-2024-1111", "cvss_version": "v2", "base_score": 5.0,
            "affected": [" WEB.Example.com "],
        }))
        assert out[0].affected == ("web.example.com",)


class TestIngest:
    def scan(self):
        return [
            rec(fqdn="web.example.com", internet_facing=True, domains=["tls"],
                algorithms=["RSA-2048", "AES-256"], business_weight=0.5,
                addresses=[{"ip": "10.0.0.5", "confidence": 0.9}],
                links=[{"target": "db.example.com", "relation": "DEPENDS_ON", "confidence": 0.8}]),
            rec(fqdn="db.example.com", domains=["pki"], resistance=0.4,
                business_weight=0.9, crown_impact=0.95),
        ]

    def test_nodes_edges_and_report(self):
        graph, report = ingest(self.scan())
        assert report.records_in == 2
        assert set(graph.nodes) == {"web.example.com", "db.example.com", "10.0.0.5"}
        assert report.synthesized_ips == ["10.0.0.5"]
        assert graph.nodes["10.0.0.5"].kind == NodeKind.IP
        rels = {(e.source, e.target): e.relation for e in graph.edges}
        assert rels[("web.example.com", "10.0.0.5")] == Relation.RESOLVES_TO
        assert rels[("web.example.com", "db.example.com")] == Relation.DEPENDS_ON

    def test_bare_string_addresses(self):
        # some scanners emit addresses as plain strings, no confidence
        graph, report = ingest([rec(fqdn="web.example.com", addresses=["10.1.1.9"])])
        assert report.synthesized_ips == ["10.1.1.9"]
        e = graph.edges[0]
        assert (e.source, e.target, e.exploitability) == ("web.example.com", "10.1.1.9", 1.0)

    def test_resistance_from_weakest_algorithm(self):
        graph, _ = ingest(self.scan())
        reg = ResistanceRegistry.default()
        web = graph.nodes["web.example.com"]
        assert web.resistance == min(reg.lookup("RSA-2048").value, reg.lookup("AES-256").value)
        # explicit resistance bypasses the registry
        assert graph.nodes["db.example.com"].resistance == 0.4

    def test_entry_flag_from_internet_facing(self):
        graph, _ = ingest(self.scan())
        assert graph.nodes["web.example.com"].is_entry
        assert not graph.nodes["db.example.com"].is_entry

    def test_unknown_link_target_skipped(self):
        records = [rec(fqdn="a.example.com",
                       links=[{"target": "gone.example.com", "relation": "USES"}])]
        graph, report = ingest(records)
        assert len(graph.edges) == 0
        assert len(report.skipped_links) == 1

    def test_unknown_link_relation_skipped(self):
        records = [
            rec(fqdn="a.example.com", links=[{"target": "b.example.com", "relation": "TELEPORTS"}]),
            rec(fqdn="b.example.com"),
        ]
        graph, report = ingest(records)
        assert len(graph.edges) == 0
        assert "TELEPORTS" in report.skipped_links[0]

    def test_enrichment_picks_strongest_evidence(self):
        feed = "\n".join([
            json.dumps({"cve_id": "CVE-2024-9999", "source": "cve_search",
                        "cvss_version": "v3_1", "base_score": 9.0,
                        "affected": ["web.example.com"]}),
            json.dumps({"cve_id": "CVE-2024-9999", "source": "cisa_kev",
                        "cvss_version": "v2", "base_score": 8.0,
                        "affected": ["web.example.com"]}),
        ])
        graph, _ = ingest(self.scan(), vuln_feed=feed)
        node = graph.nodes["cve-2024-9999"]
        assert node.kind == NodeKind.CVE
        exposes = [e for e in graph.edges if e.relation == Relation.EXPOSES]
        assert len(exposes) == 1
        # 1.0 * 0.8 beats 0.8 * 0.9
        assert exposes[0].exploitability == pytest.approx(0.8)
        assert exposes[0].provenance == "vuln:cisa_kev"
        assert exposes[0].source == "web.example.com"

    def test_orphan_cve_reported_not_added(self):
        feed = json.dumps({"cve_id": "CVE-2024-0001", "cvss_version": "v2",
                           "base_score": 5.0, "affected": ["nosuch.example.com"]})
        graph, report = ingest(self.scan(), vuln_feed=feed)
        assert "cve-2024-0001" not in graph.nodes
        assert len(report.orphans) == 1

    def test_merged_observations_round_trip(self):
        records = self.scan() + [
            rec(fqdn="WEB.example.com", domains=["tls", "vpn"],
                observed_at="2026-02-01", business_weight=0.6),
        ]
        graph, report = ingest(records)
        assert report.records_in == 3
        assert report.assets == 3
        web = graph.nodes["web.example.com"]
        assert web.domains == frozenset({"tls", "vpn"})
        assert web.business_weight == 0.6
