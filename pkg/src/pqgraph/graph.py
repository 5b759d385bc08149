"""Heterogeneous asset graph: typed nodes, typed weighted edges, adjacency.

The graph is immutable after ``build_graph``; mutation happens by building a
new snapshot. ``GraphIndex`` is the dense/sparse view the scoring backends
share: nodes in sorted-id order, parallel edges between the same node pair
merged by maximum exploitability, rejected edges excluded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import StructuralError, ValidationError

NodeId = str


class NodeKind(str, enum.Enum):
    ASSET = "asset"
    IP = "ip"
    CERTIFICATE = "certificate"
    KEY = "key"
    SERVICE = "service"
    CVE = "cve"
    RISK_CLUSTER = "risk_cluster"


class Relation(str, enum.Enum):
    USES = "USES"
    CONNECTS_TO = "CONNECTS_TO"
    EXPOSES = "EXPOSES"
    DEPENDS_ON = "DEPENDS_ON"
    RESOLVES_TO = "RESOLVES_TO"
    PROTECTED_BY = "PROTECTED_BY"
    HOSTS = "HOSTS"
    SIGNS = "SIGNS"
    STORES = "STORES"
    TRUSTS = "TRUSTS"


class ValidationStatus(str, enum.Enum):
    UNVALIDATED = "unvalidated"
    AUTO_APPROVED = "auto_approved"
    LLM_APPROVED = "llm_approved"
    HUMAN_APPROVED = "human_approved"
    REJECTED = "rejected"
    UNDER_REVIEW = "under_review"


def _check_unit(name: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


@dataclass(frozen=True)
class AssetNode:
    id: NodeId
    kind: NodeKind
    label: str = ""
    resistance: float = 0.0
    business_weight: float = 0.0
    domains: frozenset[str] = frozenset()
    crown_impact: float = 0.0
    is_entry: bool = False
    algorithms: tuple[str, ...] = ()
    attributes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValidationError("node id must be non-empty")
        _check_unit(f"resistance of {self.id!r}", self.resistance)
        _check_unit(f"business_weight of {self.id!r}", self.business_weight)
        _check_unit(f"crown_impact of {self.id!r}", self.crown_impact)


@dataclass(frozen=True)
class DependencyEdge:
    source: NodeId
    target: NodeId
    relation: Relation
    exploitability: float = 0.0
    validation_status: ValidationStatus = ValidationStatus.UNVALIDATED
    provenance: str = ""

    def __post_init__(self):
        if self.source == self.target:
            raise ValidationError(f"self-loop on {self.source!r} is not allowed")
        _check_unit(f"exploitability of {self.source}->{self.target}", self.exploitability)

    @property
    def identity(self) -> tuple[NodeId, NodeId, str]:
        return (self.source, self.target, self.relation.value)


class AssetGraph:
    """Directed property graph over ``AssetNode``/``DependencyEdge``.

    Treat instances as immutable; derive modified copies via ``replace``.
    """

    def __init__(self, nodes: dict[NodeId, AssetNode], edges: tuple[DependencyEdge, ...]):
        self.nodes = nodes
        self.edges = edges
        self._out: dict[NodeId, tuple[int, ...]] = {}
        self._in: dict[NodeId, tuple[int, ...]] = {}
        out: dict[NodeId, list[int]] = {}
        inc: dict[NodeId, list[int]] = {}
        for i, e in enumerate(edges):
            out.setdefault(e.source, []).append(i)
            inc.setdefault(e.target, []).append(i)
        self._out = {k: tuple(v) for k, v in out.items()}
        self._in = {k: tuple(v) for k, v in inc.items()}

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: NodeId) -> AssetNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise StructuralError(f"unknown node {node_id!r}") from None

    def out_edges(self, node_id: NodeId) -> Iterator[DependencyEdge]:
        return (self.edges[i] for i in self._out.get(node_id, ()))

    def in_edges(self, node_id: NodeId) -> Iterator[DependencyEdge]:
        return (self.edges[i] for i in self._in.get(node_id, ()))

    def active_edges(self) -> Iterator[DependencyEdge]:
        """Edges that participate in scoring: everything not rejected."""
        return (e for e in self.edges if e.validation_status is not ValidationStatus.REJECTED)

    def replace(
        self,
        nodes: Iterable[AssetNode] | None = None,
        edges: Iterable[DependencyEdge] | None = None,
    ) -> "AssetGraph":
        return build_graph(
            list(nodes) if nodes is not None else list(self.nodes.values()),
            list(edges) if edges is not None else list(self.edges),
        )

    def with_zero_resistance(self) -> "AssetGraph":
        """Copy of the graph with every node fully quantum-vulnerable."""
        from dataclasses import replace as _dc_replace

        return self.replace(nodes=[_dc_replace(n, resistance=0.0) for n in self.nodes.values()])


def build_graph(nodes: Iterable[AssetNode], edges: Iterable[DependencyEdge]) -> AssetGraph:
    """Validate and index a graph.

    Duplicate node ids are rejected. Duplicate (source, target, relation)
    edges collapse keeping the maximum exploitability: the worst-case
    dependency wins. Edges referencing missing nodes are structural errors.
    """
    node_map: dict[NodeId, AssetNode] = {}
    for n in nodes:
        if n.id in node_map:
            raise StructuralError(f"duplicate node id {n.id!r}")
        node_map[n.id] = n

    merged: dict[tuple[NodeId, NodeId, str], DependencyEdge] = {}
    missing: list[str] = []
    for e in edges:
        for endpoint in (e.source, e.target):
            if endpoint not in node_map:
                missing.append(f"{e.source}->{e.target} [{e.relation.value}] references {endpoint!r}")
        key = e.identity
        prev = merged.get(key)
        if prev is None or e.exploitability > prev.exploitability:
            merged[key] = e
    if missing:
        raise StructuralError("edges reference missing nodes: " + "; ".join(sorted(set(missing))))

    ordered = tuple(sorted(merged.values(), key=lambda e: e.identity))
    return AssetGraph(node_map, ordered)


class GraphIndex:
    """Array view of a graph for the numeric backends.

    Nodes appear in sorted-id order. Parallel edges between the same ordered
    node pair (differing relation) merge by maximum exploitability so both
    backends see one logical link per pair. Rejected edges are dropped.
    """

    def __init__(self, graph: AssetGraph):
        self.ids: tuple[NodeId, ...] = tuple(sorted(graph.nodes))
        self.pos: dict[NodeId, int] = {nid: i for i, nid in enumerate(self.ids)}
        n = len(self.ids)
        self.resistance = np.zeros(n)
        self.weight = np.zeros(n)
        for i, nid in enumerate(self.ids):
            node = graph.nodes[nid]
            self.resistance[i] = node.resistance
            self.weight[i] = node.business_weight

        pair_p: dict[tuple[int, int], float] = {}
        for e in graph.active_edges():
            key = (self.pos[e.source], self.pos[e.target])
            prev = pair_p.get(key)
            if prev is None or e.exploitability > prev:
                pair_p[key] = e.exploitability

        pairs = sorted(pair_p)
        m = len(pairs)
        self.edge_src = np.fromiter((u for u, _ in pairs), dtype=np.int64, count=m)
        self.edge_dst = np.fromiter((v for _, v in pairs), dtype=np.int64, count=m)
        self.edge_p = np.fromiter((pair_p[k] for k in pairs), dtype=np.float64, count=m)

        # CSR over sources; edge order inside a row follows target index.
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, self.edge_src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.targets = self.edge_dst

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_p)

    def edge_prob(self, u: NodeId, v: NodeId) -> float | None:
        """Merged exploitability of the link u->v, or None when absent."""
        ui, vi = self.pos.get(u), self.pos.get(v)
        if ui is None or vi is None:
            return None
        lo, hi = self.indptr[ui], self.indptr[ui + 1]
        for k in range(lo, hi):
            if self.targets[k] == vi:
                return float(self.edge_p[k])
        return None
