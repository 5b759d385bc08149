"""Synthetic graphs, the Monte Carlo compromise oracle, and experiments.

The generator emits snapshot documents (bit-identical per seed: the
timestamp is a fixed constant and all randomness flows from one seeded
generator). Default mode redirects every sampled edge forward, from lower
to higher node index, so graphs are acyclic and exact scoring stays cheap;
entries sit at the low end, crown jewels at the high end. A cyclic option
keeps sampled directions for stressing the all-walks backend.

The oracle simulates harvest-now-decrypt-later trials directly: per sample
every node is quantum-weak with probability 1 - R_v and every edge succeeds
with probability p_uv; a trial is a compromise when some entry reaches some
crown through weak nodes over successful edges. Uniform variates are drawn
outside the counting kernel, so both kernel backends see identical draws
and produce identical counts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Any, Callable

import numpy as np
from scipy import stats

from . import kernels
from .config import ScoringConfig, ScoringContext, make_context
from .errors import ConfigurationError
from .graph import (
    AssetGraph,
    AssetNode,
    DependencyEdge,
    GraphIndex,
    NodeKind,
    Relation,
)
from .katz import KatzScorer
from .paths import ExactScorer
from .snapshot import SnapshotDocument, edge_record, node_record, to_graph

GEN_TIMESTAMP = "2026-01-01T00:00:00Z"

_RELATION_CHOICES = (
    Relation.CONNECTS_TO,
    Relation.DEPENDS_ON,
    Relation.USES,
    Relation.HOSTS,
    Relation.TRUSTS,
)
_RELATION_WEIGHTS = (0.4, 0.3, 0.15, 0.1, 0.05)


@dataclass(frozen=True)
class GenSpec:
    n: int = 30
    density: float = 0.08
    n_domains: int = 4
    entry_fraction: float = 0.15
    crown_fraction: float = 0.1
    resistance_profile: str = "mixed"
    cyclic: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise ConfigurationError("need at least 3 nodes")
        if not (0.0 < self.density <= 1.0):
            raise ConfigurationError("density must lie in (0, 1]")
        for name in ("entry_fraction", "crown_fraction"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ConfigurationError(f"{name} must lie in (0, 1)")
        if self.n_domains < 1:
            raise ConfigurationError("need at least one domain")
        if self.resistance_profile not in ("mixed", "vulnerable", "safe"):
            raise ConfigurationError(f"unknown resistance_profile {self.resistance_profile!r}")


def _sample_resistance(rng: np.random.Generator, profile: str, count: int) -> np.ndarray:
    if profile == "vulnerable":
        return rng.uniform(0.0, 0.3, size=count)
    if profile == "safe":
        return np.full(count, 0.95)
    # Each generated org gets its own migration posture: the category mix is
    # itself random, so aggregate weakness varies across a corpus instead of
    # concentrating at one level.
    mix = rng.dirichlet((1.0, 1.0, 1.0))
    cats = rng.choice(3, size=count, p=mix)
    r = np.empty(count)
    r[cats == 0] = rng.uniform(0.0, 0.3, size=int((cats == 0).sum()))
    r[cats == 1] = rng.uniform(0.3, 0.7, size=int((cats == 1).sum()))
    r[cats == 2] = rng.uniform(0.9, 1.0, size=int((cats == 2).sum()))
    return r


def generate(spec: GenSpec) -> SnapshotDocument:
    """Random snapshot document, bit-identical for identical specs."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    n_entries = max(1, round(n * spec.entry_fraction))
    n_crowns = max(1, round(n * spec.crown_fraction))
    if n_entries + n_crowns > n:
        raise ConfigurationError("entry and crown fractions leave no interior nodes")
    width = len(str(n - 1))
    ids = [f"n{i:0{width}d}" for i in range(n)]

    resistance = _sample_resistance(rng, spec.resistance_profile, n)
    if spec.resistance_profile == "mixed":
        # Entry points model internet-facing endpoints still on classical
        # crypto; drawing them from the vulnerable band keeps the corpus
        # realistic and keeps entry posture visible to both backends.
        resistance[:n_entries] = rng.uniform(0.0, 0.3, size=n_entries)
    weight = rng.uniform(0.5, 1.0, size=n)
    impact = rng.uniform(0.91, 0.99, size=n)
    primary_domain = rng.integers(0, spec.n_domains, size=n)
    extra_membership = rng.random((n, spec.n_domains)) < 0.3
    kinds = rng.random(n) < 0.35

    nodes = []
    for i in range(n):
        doms = {f"dom{int(primary_domain[i]):02d}"}
        doms.update(f"dom{j:02d}" for j in range(spec.n_domains) if extra_membership[i, j])
        is_entry = i < n_entries
        is_crown = i >= n - n_crowns
        nodes.append(
            AssetNode(
                id=ids[i],
                kind=NodeKind.SERVICE if (kinds[i] and not is_entry and not is_crown) else NodeKind.ASSET,
                resistance=float(resistance[i]),
                business_weight=float(weight[i]),
                domains=frozenset(doms),
                crown_impact=float(impact[i]) if is_crown else 0.0,
                is_entry=is_entry,
            )
        )

    # One Bernoulli per ordered pair keeps the record count at the textbook
    # binomial; acyclic mode then redirects backward draws forward.
    hits = rng.random((n, n)) < spec.density
    np.fill_diagonal(hits, False)
    srcs, dsts = np.nonzero(hits)
    probs = rng.uniform(0.05, 0.95, size=len(srcs))
    rels = rng.choice(len(_RELATION_CHOICES), size=len(srcs), p=_RELATION_WEIGHTS)

    edges = []
    for k in range(len(srcs)):
        u, v = int(srcs[k]), int(dsts[k])
        if not spec.cyclic and u > v:
            u, v = v, u
        edges.append(
            DependencyEdge(
                source=ids[u],
                target=ids[v],
                relation=_RELATION_CHOICES[int(rels[k])],
                exploitability=float(probs[k]),
            )
        )

    provenance = {"generator": {"spec": {
        "n": spec.n,
        "density": spec.density,
        "n_domains": spec.n_domains,
        "entry_fraction": spec.entry_fraction,
        "crown_fraction": spec.crown_fraction,
        "resistance_profile": spec.resistance_profile,
        "cyclic": spec.cyclic,
        "seed": spec.seed,
    }}}
    return SnapshotDocument(
        generated_at=GEN_TIMESTAMP,
        nodes=[node_record(x) for x in nodes],
        edges=[edge_record(e) for e in edges],
        provenance=provenance,
    )


def generate_graph(spec: GenSpec) -> AssetGraph:
    return to_graph(generate(spec))


def gen_disjoint_chains(
    n_chains: int,
    chain_len: int,
    seed: int,
    n_domains: int = 3,
) -> AssetGraph:
    """Family where path events are independent by construction.

    Chains from distinct entries meet at one shared crown whose resistance
    is pinned to 0; the shared weakness factor is then deterministic, so
    per-chain compromise events are independent and the exact exposure
    equals the any-chain probability the oracle estimates. Interior chain
    nodes are disjoint; every node carries a domain.
    """
    if n_chains < 1 or chain_len < 2:
        raise ConfigurationError("need at least one chain of at least two nodes")
    rng = np.random.default_rng(seed)
    nodes = [
        AssetNode(
            id="crown",
            kind=NodeKind.ASSET,
            resistance=0.0,
            business_weight=1.0,
            domains=frozenset({f"dom{rng.integers(0, n_domains):02d}"}),
            crown_impact=1.0,
        )
    ]
    edges = []
    for c in range(n_chains):
        prev = None
        for s in range(chain_len - 1):
            nid = f"c{c}s{s}"
            nodes.append(
                AssetNode(
                    id=nid,
                    kind=NodeKind.ASSET,
                    resistance=float(rng.uniform(0.0, 0.6)),
                    business_weight=1.0,
                    domains=frozenset({f"dom{rng.integers(0, n_domains):02d}"}),
                    is_entry=(s == 0),
                )
            )
            if prev is not None:
                edges.append(
                    DependencyEdge(prev, nid, Relation.DEPENDS_ON, float(rng.uniform(0.3, 0.95)))
                )
            prev = nid
        edges.append(
            DependencyEdge(prev, "crown", Relation.DEPENDS_ON, float(rng.uniform(0.3, 0.95)))
        )
    from .graph import build_graph

    return build_graph(nodes, edges)


# -- Monte Carlo oracle ------------------------------------------------------

MC_MIN_SAMPLES = 1_000
MC_CHUNK = 16_384


@dataclass(frozen=True)
class OracleEstimate:
    estimate: float
    samples: int
    standard_error: float
    seed: int


def mc_compromise(
    graph: AssetGraph,
    ctx: ScoringContext,
    samples: int,
    seed: int,
) -> OracleEstimate:
    """Direct compromise simulation over the active merged-edge graph.

    Estimates the fully-labeled compromise probability: domain coverage is
    taken as total, matching exact scoring of the full coalition on graphs
    where every node carries at least one domain.
    """
    if samples < MC_MIN_SAMPLES:
        raise ConfigurationError(f"need at least {MC_MIN_SAMPLES} samples, got {samples}")
    index = GraphIndex(graph)
    n, m = index.n_nodes, index.n_edges
    weakness = 1.0 - index.resistance
    entry_idx = np.array(sorted(index.pos[e] for e in ctx.entries), dtype=np.int64)
    crown_flag = np.zeros(n, dtype=np.bool_)
    for c in ctx.crowns:
        crown_flag[index.pos[c]] = True

    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        chunk = min(MC_CHUNK, samples - done)
        node_u = rng.random((chunk, n))
        edge_u = rng.random((chunk, m)) if m else np.zeros((chunk, 0))
        weak = node_u < weakness
        edge_ok = edge_u < index.edge_p
        hits += kernels.mc_count(index.indptr, index.targets, edge_ok, weak, entry_idx, crown_flag)
        done += chunk

    p_hat = hits / samples
    se = math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return OracleEstimate(p_hat, samples, se, seed)


# -- experiments -------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationResult:
    spearman: float | None
    pairs: tuple[tuple[float, float], ...]
    note: str = ""


def experiment_correlation(
    n_graphs: int = 50,
    base_seed: int = 0,
    template: GenSpec | None = None,
) -> CorrelationResult:
    """Score generated DAGs with both backends, rank-correlate the results."""
    if n_graphs < 10:
        raise ConfigurationError(f"need at least 10 graphs for a rank correlation, got {n_graphs}")
    template = template or GenSpec()
    pairs = []
    for i in range(n_graphs):
        spec = replace(template, seed=base_seed + i, cyclic=False)
        graph = generate_graph(spec)
        ctx = make_context(graph)
        e_exact = ExactScorer(graph, ctx).exposure(ctx.full_coalition)
        e_katz = KatzScorer(graph, ctx).exposure(ctx.full_coalition)
        pairs.append((e_exact, e_katz))
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        return CorrelationResult(None, tuple(pairs), "degenerate: a backend produced constant scores")
    rho = float(stats.spearmanr(xs, ys).statistic)
    return CorrelationResult(rho, tuple(pairs))


@dataclass(frozen=True)
class SensitivityReport:
    trials: int
    violations: int
    worst: float
    by_parameter: dict[str, int]


SENSITIVITY_SLACK = 1e-12


def _bumped_nodes(graph: AssetGraph, nid: str, **changes) -> AssetGraph:
    nodes = [replace(n, **changes) if n.id == nid else n for n in graph.nodes.values()]
    return graph.replace(nodes=nodes)


def experiment_sensitivity(
    graph: AssetGraph,
    ctx: ScoringContext,
    trials: int,
    seed: int,
    delta: float = 1e-3,
    backend: str = "exact",
    check_impact: bool = False,
) -> SensitivityReport:
    """Randomized single-parameter monotonicity probe.

    Per trial, one parameter moves by +-delta (clamped into range) and the
    exposure difference across the two variants must have the required
    sign: hardening never raises exposure, exploitability never lowers it,
    and impact weight never lowers it. Impact checks only make sense with
    at least two crowns and run on the all-walks backend, where exposure is
    linear in the impact vector; the path backend's impact-weighted mean
    moves either way, so impact bumps are skipped there.

    The all-walks backend reuses the base graph's damping factor for every
    variant: recomputing it per variant rescales the functional and can
    flip a comparison that is not about the parameter at all.
    """
    rng = np.random.default_rng(seed)
    index = GraphIndex(graph)
    frozen_alpha = None
    if backend == "katz":
        frozen_alpha = KatzScorer(graph, ctx).alpha

    def score(g: AssetGraph) -> float:
        c = make_context(g, ctx.config)
        if backend == "exact":
            return ExactScorer(g, c).exposure(c.full_coalition)
        return KatzScorer(g, c, alpha=frozen_alpha).exposure(c.full_coalition)

    params: list[tuple[str, Any]] = []
    params.extend(("resistance", nid) for nid in index.ids)
    params.extend(
        ("exploitability", (index.ids[int(u)], index.ids[int(v)]))
        for u, v in zip(index.edge_src, index.edge_dst)
    )
    if check_impact and len(ctx.crowns) >= 2:
        params.extend(("impact", c) for c in ctx.crowns)
    if not params:
        raise ConfigurationError("graph offers no parameters to bump")

    violations = 0
    worst = 0.0
    by_parameter = {"resistance": 0, "exploitability": 0, "impact": 0}
    for _ in range(trials):
        kind, ref = params[int(rng.integers(0, len(params)))]
        if kind == "resistance":
            x = graph.nodes[ref].resistance
            lo, hi = max(0.0, x - delta), min(1.0, x + delta)
            diff = score(_bumped_nodes(graph, ref, resistance=hi)) - score(
                _bumped_nodes(graph, ref, resistance=lo)
            )
            bad = diff > SENSITIVITY_SLACK
        elif kind == "exploitability":
            u, v = ref
            base_edges = list(graph.edges)

            def with_p(p: float) -> AssetGraph:
                out = [
                    replace(e, exploitability=p) if (e.source == u and e.target == v) else e
                    for e in base_edges
                ]
                return graph.replace(edges=out)

            x = max(
                e.exploitability for e in base_edges if e.source == u and e.target == v
            )
            lo, hi = max(0.0, x - delta), min(1.0, x + delta)
            diff = score(with_p(hi)) - score(with_p(lo))
            bad = diff < -SENSITIVITY_SLACK
        else:
            x = graph.nodes[ref].crown_impact
            lo, hi = max(0.0, x - delta), min(1.0, x + delta)
            diff = score(_bumped_nodes(graph, ref, crown_impact=hi)) - score(
                _bumped_nodes(graph, ref, crown_impact=lo)
            )
            bad = diff < -SENSITIVITY_SLACK
        if bad:
            violations += 1
            by_parameter[kind] += 1
            worst = max(worst, abs(diff))
    return SensitivityReport(trials, violations, worst, by_parameter)


# -- kernel benchmark --------------------------------------------------------


def _time_call(fn: Callable[[], Any], repeats: int = 3) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_benchmark(seed: int = 0, samples: int = 50_000) -> dict[str, Any]:
    """Time both kernel backends on one generated workload.

    Calls each implementation explicitly, ignoring the environment flag, so
    the comparison is in-process and apples-to-apples.
    """
    spec = GenSpec(n=40, density=0.08, seed=seed)
    graph = generate_graph(spec)
    ctx = make_context(graph)
    scorer = ExactScorer(graph, ctx)
    mask = (1 << len(scorer.order)) - 1
    args = (scorer._offsets, scorer._flat_masks, scorer._base, scorer._group_starts, mask)

    index = scorer.index
    rng = np.random.default_rng(seed)
    node_u = rng.random((samples, index.n_nodes))
    edge_u = rng.random((samples, index.n_edges))
    weak = node_u < (1.0 - index.resistance)
    edge_ok = edge_u < index.edge_p
    entry_idx = np.array(sorted(index.pos[e] for e in ctx.entries), dtype=np.int64)
    crown_flag = np.zeros(index.n_nodes, dtype=np.bool_)
    for c in ctx.crowns:
        crown_flag[index.pos[c]] = True
    mc_args = (index.indptr, index.targets, edge_ok, weak, entry_idx, crown_flag)

    out: dict[str, Any] = {
        "workload": {"n_nodes": index.n_nodes, "n_edges": index.n_edges, "n_paths": scorer.n_paths, "mc_samples": samples},
        "numba_available": kernels.survival_products_numba is not None,
        "active_backend": kernels.active_backend(),
    }

    coalition_reps = 200

    def run_np():
        for _ in range(coalition_reps):
            kernels.survival_products_numpy(*args)

    out["survival_numpy_s"] = _time_call(run_np)
    out["mc_numpy_s"] = _time_call(lambda: kernels.mc_count_numpy(*mc_args))

    if kernels.survival_products_numba is not None:
        kernels.survival_products_numba(*args)  # compile outside the timer
        kernels.mc_count_numba(*mc_args)

        def run_nb():
            for _ in range(coalition_reps):
                kernels.survival_products_numba(*args)

        out["survival_numba_s"] = _time_call(run_nb)
        out["mc_numba_s"] = _time_call(lambda: kernels.mc_count_numba(*mc_args))
        out["survival_speedup"] = out["survival_numpy_s"] / out["survival_numba_s"]
        out["mc_speedup"] = out["mc_numpy_s"] / out["mc_numba_s"]

        same_surv = np.array_equal(
            kernels.survival_products_numpy(*args), kernels.survival_products_numba(*args)
        )
        same_mc = kernels.mc_count_numpy(*mc_args) == kernels.mc_count_numba(*mc_args)
        out["backends_agree"] = bool(same_surv and same_mc)
    return out
