"""Scoring configuration shared across backends.

A ``ScoringContext`` freezes everything a scoring run needs besides the
coalition: entry nodes, crown nodes with impacts, the domain universe, and
numeric knobs. Building it once per run keeps alpha and the sorted domain
order stable across every coalition evaluated in that run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ConfigurationError, StructuralError
from .graph import AssetGraph, NodeId

Coalition = frozenset[str]

MAX_PATH_NODES_DEFAULT = 8
PATH_CAP_DEFAULT = 1_000_000
KATZ_KAPPA_DEFAULT = 0.5
AUTO_THRESHOLD_DEFAULT = 500
MAX_BITMASK_DOMAINS = 63

_MODE_ALIASES = {"exact": "exact", "exact_paths": "exact", "katz": "katz", "auto": "auto"}


@dataclass(frozen=True)
class ScoringConfig:
    mode: str = "exact"
    max_path_nodes: int = MAX_PATH_NODES_DEFAULT
    path_cap: int = PATH_CAP_DEFAULT
    katz_kappa: float = KATZ_KAPPA_DEFAULT
    auto_threshold: int = AUTO_THRESHOLD_DEFAULT

    def __post_init__(self):
        canonical = _MODE_ALIASES.get(self.mode)
        if canonical is None:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "mode", canonical)
        if self.max_path_nodes < 2:
            raise ConfigurationError("max_path_nodes must be at least 2 (entry plus crown)")
        if self.path_cap < 1:
            raise ConfigurationError("path_cap must be positive")
        if not (0.0 < self.katz_kappa < 1.0):
            raise ConfigurationError("katz_kappa must lie in (0, 1)")
        if self.auto_threshold < 1:
            raise ConfigurationError("auto_threshold must be positive")

    def resolved_mode(self, n_nodes: int) -> str:
        """Backend actually used: auto picks exact up to the node threshold."""
        if self.mode == "auto":
            return "exact" if n_nodes <= self.auto_threshold else "katz"
        return self.mode


@dataclass(frozen=True)
class ScoringContext:
    """Graph-derived facts every coalition evaluation reuses."""

    entries: tuple[NodeId, ...]
    crowns: tuple[NodeId, ...]
    impacts: dict[NodeId, float] = field(hash=False)
    domains: tuple[str, ...] = ()
    config: ScoringConfig = ScoringConfig()

    @property
    def full_coalition(self) -> Coalition:
        return frozenset(self.domains)


def collect_domains(graph: AssetGraph) -> tuple[str, ...]:
    seen: set[str] = set()
    for node in graph.nodes.values():
        seen.update(node.domains)
    return tuple(sorted(seen))


def make_context(
    graph: AssetGraph,
    config: ScoringConfig | None = None,
    crown_threshold: float = 0.9,
) -> ScoringContext:
    """Derive entries, crowns, and the domain universe from node attributes.

    Crowns are nodes whose crown_impact exceeds the threshold; a graph with
    no entry or no crown cannot be scored.
    """
    entries = tuple(sorted(n.id for n in graph.nodes.values() if n.is_entry))
    crowns = tuple(sorted(n.id for n in graph.nodes.values() if n.crown_impact > crown_threshold))
    if not entries:
        raise StructuralError("graph has no entry nodes")
    if not crowns:
        raise StructuralError("graph has no crown-jewel nodes")
    impacts = {c: graph.nodes[c].crown_impact for c in crowns}
    return ScoringContext(
        entries=entries,
        crowns=crowns,
        impacts=impacts,
        domains=collect_domains(graph),
        config=config or ScoringConfig(),
    )


def domain_order(domains: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(domains)))


def domain_bit(order: tuple[str, ...], domain: str) -> int:
    return order.index(domain)


def coalition_mask(order: tuple[str, ...], coalition: Coalition) -> int:
    """Pack a coalition into an int bitmask following the sorted order."""
    if len(order) > MAX_BITMASK_DOMAINS:
        raise ConfigurationError(
            f"bitmask packing supports at most {MAX_BITMASK_DOMAINS} domains, got {len(order)}"
        )
    mask = 0
    for i, d in enumerate(order):
        if d in coalition:
            mask |= 1 << i
    return mask


def node_domain_mask(order: tuple[str, ...], domains: frozenset[str]) -> int:
    return coalition_mask(order, frozenset(domains))
