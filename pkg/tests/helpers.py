"""Small graph builders shared across test modules."""

from __future__ import annotations

from pqgraph.graph import (
    AssetGraph,
    AssetNode,
    DependencyEdge,
    NodeKind,
    Relation,
    build_graph,
)


def node(
    nid: str,
    *,
    kind: NodeKind = NodeKind.ASSET,
    r: float = 0.0,
    w: float = 0.0,
    domains=(),
    impact: float = 0.0,
    entry: bool = False,
    **kw,
) -> AssetNode:
    return AssetNode(
        id=nid,
        kind=kind,
        resistance=r,
        business_weight=w,
        domains=frozenset(domains),
        crown_impact=impact,
        is_entry=entry,
        **kw,
    )


def edge(u: str, v: str, p: float, relation: Relation = Relation.CONNECTS_TO, **kw) -> DependencyEdge:
    return DependencyEdge(source=u, target=v, relation=relation, exploitability=p, **kw)


def graph_of(nodes, edges) -> AssetGraph:
    return build_graph(nodes, edges)
