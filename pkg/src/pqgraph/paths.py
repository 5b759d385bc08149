"""Exact exposure scoring by exhaustive attack-path enumeration.

An attack path runs from an entry node to a crown-jewel node along active
edges, visits no node twice, and has at least one edge. Enumeration is a
depth-first walk in deterministic order (entries sorted, neighbors sorted by
node id) so the path list, and everything derived from it, is reproducible.

Per-path compromise probability factors as a coalition-independent base
(edge exploitabilities times per-node quantum weakness ``1 - R_v`` over every
node on the path) times the coalition coverage fraction chi: the share of
path nodes owning at least one domain in the coalition. Crown compromise
combines paths as independent events; exposure is the impact-weighted mean
of crown compromise probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .config import Coalition, ScoringContext, coalition_mask, domain_order, node_domain_mask
from .errors import ConfigurationError, PathExplosionError, StructuralError
from .graph import AssetGraph, GraphIndex, NodeId


@dataclass(frozen=True)
class AttackPath:
    nodes: tuple[NodeId, ...]
    crown: NodeId
    base_probability: float

    def __len__(self) -> int:
        return len(self.nodes)


def enumerate_paths(
    index: GraphIndex,
    entries: Sequence[NodeId],
    crowns: Sequence[NodeId],
    max_nodes: int,
    cap: int,
) -> list[tuple[int, ...]]:
    """All simple entry-to-crown paths with at most ``max_nodes`` nodes.

    Paths may pass through crown nodes and continue; every crown visit at
    depth two or more records a path. Raises ``PathExplosionError`` once the
    recorded count exceeds ``cap``.
    """
    crown_set = {index.pos[c] for c in crowns}
    entry_indices = sorted(index.pos[e] for e in entries)
    indptr, targets = index.indptr, index.targets
    paths: list[tuple[int, ...]] = []
    on_path = np.zeros(index.n_nodes, dtype=bool)

    for e0 in entry_indices:
        stack: list[list[int]] = [[e0, int(indptr[e0])]]
        on_path[e0] = True
        path = [e0]
        while stack:
            frame = stack[-1]
            u, ptr = frame
            if ptr < indptr[u + 1]:
                frame[1] = ptr + 1
                v = int(targets[ptr])
                if on_path[v] or len(path) >= max_nodes:
                    continue
                path.append(v)
                on_path[v] = True
                if v in crown_set:
                    paths.append(tuple(path))
                    if len(paths) > cap:
                        raise PathExplosionError(cap)
                stack.append([v, int(indptr[v])])
            else:
                stack.pop()
                on_path[u] = False
                path.pop()
    return paths


def path_probability(nodes: Sequence[NodeId], graph: AssetGraph, coalition: Coalition) -> float:
    """Compromise probability of one explicit path under a coalition."""
    if len(nodes) < 2:
        raise StructuralError("a path needs at least two nodes")
    index = GraphIndex(graph)
    prob = 1.0
    for u, v in zip(nodes, nodes[1:]):
        p = index.edge_prob(u, v)
        if p is None:
            raise StructuralError(f"path uses missing edge {u}->{v}")
        prob *= p
    covered = 0
    for nid in nodes:
        node = graph.node(nid)
        prob *= 1.0 - node.resistance
        if node.domains & coalition:
            covered += 1
    return prob * (covered / len(nodes))


class ExactScorer:
    """Reusable exact scorer: enumerate once, evaluate many coalitions."""

    def __init__(self, graph: AssetGraph, ctx: ScoringContext):
        self.graph = graph
        self.ctx = ctx
        self.index = GraphIndex(graph)
        self.order = domain_order(ctx.domains)
        cfg = ctx.config
        raw = enumerate_paths(self.index, ctx.entries, ctx.crowns, cfg.max_path_nodes, cfg.path_cap)

        crown_rank = {self.index.pos[c]: i for i, c in enumerate(ctx.crowns)}
        raw.sort(key=lambda p: crown_rank[p[-1]])

        node_masks = np.array(
            [node_domain_mask(self.order, graph.nodes[nid].domains) for nid in self.index.ids],
            dtype=np.int64,
        )
        weakness = 1.0 - self.index.resistance

        pair_p: dict[tuple[int, int], float] = {}
        for k in range(self.index.n_edges):
            pair_p[(int(self.index.edge_src[k]), int(self.index.edge_dst[k]))] = float(
                self.index.edge_p[k]
            )

        offsets = [0]
        flat: list[int] = []
        base = np.empty(len(raw))
        group_starts = [0]
        group_crowns: list[NodeId] = []
        prev_crown = None
        self.paths: list[AttackPath] = []
        for pi, p in enumerate(raw):
            b = 1.0
            for u, v in zip(p, p[1:]):
                b *= pair_p[(u, v)]
            for u in p:
                b *= weakness[u]
            base[pi] = b
            flat.extend(p)
            offsets.append(len(flat))
            crown = self.index.ids[p[-1]]
            if crown != prev_crown:
                if prev_crown is not None:
                    group_starts.append(pi)
                group_crowns.append(crown)
                prev_crown = crown
            self.paths.append(
                AttackPath(tuple(self.index.ids[i] for i in p), crown, float(b))
            )
        group_starts.append(len(raw))

        self._offsets = np.asarray(offsets, dtype=np.int64)
        self._flat_masks = node_masks[np.asarray(flat, dtype=np.int64)] if flat else np.zeros(0, np.int64)
        self._base = base
        self._group_starts = np.asarray(group_starts, dtype=np.int64)
        self._group_crowns = tuple(group_crowns)

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    def crown_compromise(self, coalition: Coalition) -> dict[NodeId, float]:
        """Probability each crown falls to at least one path."""
        comp = {c: 0.0 for c in self.ctx.crowns}
        if self.n_paths:
            mask = coalition_mask(self.order, coalition)
            surv = kernels.survival_products(
                self._offsets, self._flat_masks, self._base, self._group_starts, mask
            )
            for crown, s in zip(self._group_crowns, surv):
                comp[crown] = 1.0 - float(s)
        return comp

    def exposure(self, coalition: Coalition) -> float:
        comp = self.crown_compromise(coalition)
        den = sum(self.ctx.impacts.values())
        if den == 0.0:
            raise ConfigurationError("total crown impact is zero; nothing to score")
        num = sum(self.ctx.impacts[c] * comp[c] for c in self.ctx.crowns)
        return num / den

    def top_paths(self, coalition: Coalition, limit: int = 10) -> list[tuple[AttackPath, float]]:
        """Highest-probability paths under the coalition, ties by node ids."""
        if not self.n_paths:
            return []
        mask = coalition_mask(self.order, coalition)
        hits = (self._flat_masks & np.int64(mask)) != 0
        counts = np.add.reduceat(hits.astype(np.float64), self._offsets[:-1])
        lengths = np.diff(self._offsets).astype(np.float64)
        probs = self._base * (counts / lengths)
        ranked = sorted(
            zip(self.paths, probs), key=lambda item: (-item[1], item[0].nodes)
        )
        return [(p, float(pr)) for p, pr in ranked[:limit]]


def exposure_exact(graph: AssetGraph, ctx: ScoringContext, coalition: Coalition | None = None) -> float:
    scorer = ExactScorer(graph, ctx)
    return scorer.exposure(coalition if coalition is not None else ctx.full_coalition)
