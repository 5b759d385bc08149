"""Shapley attribution of total exposure across cryptographic domains.

Exact attribution evaluates the exposure of every coalition once (bitmask
memo over 2^|D| subsets, domains sorted by name) and combines marginal
contributions with the classical factorial weights. Monte Carlo attribution
samples uniform permutations and averages marginals, memoizing coalition
values across permutations so repeated prefixes cost nothing.

The empty coalition is evaluated literally, not defined to zero: the exact
backend yields 0 structurally, while the all-walks backend yields the
entry/crown overlap a.b, which can be nonzero when an entry node is itself
a crown jewel. In that case the efficiency identity telescopes to
sum(phi) = E(D) - E(empty) and the result is flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import Coalition
from .errors import ConfigurationError

EXACT_DOMAIN_CAP = 14
MC_MIN_PERMUTATIONS = 100

ValueFn = Callable[[Coalition], float]


@dataclass(frozen=True)
class AttributionResult:
    phi: dict[str, float]
    method: str
    efficiency_gap: float
    normalized_phi: dict[str, float]
    grand_value: float
    empty_value: float
    empty_overlap_flagged: bool
    permutations_sampled: int | None = None
    standard_errors: dict[str, float] | None = None


class _Memo:
    """Insert-once coalition cache keyed by domain bitmask."""

    def __init__(self, order: tuple[str, ...], value_fn: ValueFn):
        self.order = order
        self.value_fn = value_fn
        self.table: dict[int, float] = {}
        self.evaluations = 0

    def value(self, mask: int) -> float:
        hit = self.table.get(mask)
        if hit is not None:
            return hit
        coalition = frozenset(d for i, d in enumerate(self.order) if mask & (1 << i))
        v = float(self.value_fn(coalition))
        self.table[mask] = v
        self.evaluations += 1
        return v


def shapley_exact_values(domains: tuple[str, ...], value_fn: ValueFn) -> tuple[dict[str, float], float, float]:
    """Exact phi per domain plus (E(full), E(empty)).

    Refuses more than 14 domains; use the permutation sampler beyond that.
    """
    order = tuple(sorted(domains))
    n = len(order)
    if n == 0:
        raise ConfigurationError("cannot attribute over an empty domain set")
    if n > EXACT_DOMAIN_CAP:
        raise ConfigurationError(
            f"exact attribution caps at {EXACT_DOMAIN_CAP} domains, got {n}; use the Monte Carlo sampler"
        )
    memo = _Memo(order, value_fn)
    full_mask = (1 << n) - 1
    values = [memo.value(mask) for mask in range(full_mask + 1)]

    fact = [math.factorial(k) for k in range(n + 1)]
    denom = fact[n]
    phi = {}
    for i, d in enumerate(order):
        bit = 1 << i
        acc = 0.0
        for mask in range(full_mask + 1):
            if mask & bit:
                continue
            s = bin(mask).count("1")
            weight = fact[s] * fact[n - s - 1] / denom
            acc += weight * (values[mask | bit] - values[mask])
        phi[d] = acc
    return phi, values[full_mask], values[0]


def shapley_mc_values(
    domains: tuple[str, ...],
    value_fn: ValueFn,
    permutations: int,
    seed: int,
) -> tuple[dict[str, float], dict[str, float], float, float]:
    """Permutation-sampled phi with per-domain standard errors.

    Returns (phi, standard_errors, E(full), E(empty)). Deterministic for a
    fixed seed; coalition values are memoized across permutations.
    """
    order = tuple(sorted(domains))
    n = len(order)
    if n == 0:
        raise ConfigurationError("cannot attribute over an empty domain set")
    if permutations < MC_MIN_PERMUTATIONS:
        raise ConfigurationError(f"need at least {MC_MIN_PERMUTATIONS} permutations, got {permutations}")
    memo = _Memo(order, value_fn)
    rng = np.random.default_rng(seed)

    marginals = np.zeros((permutations, n))
    for t in range(permutations):
        perm = rng.permutation(n)
        mask = 0
        prev = memo.value(0)
        for i in perm:
            mask |= 1 << int(i)
            cur = memo.value(mask)
            marginals[t, i] = cur - prev
            prev = cur

    phi = {d: float(marginals[:, i].mean()) for i, d in enumerate(order)}
    if permutations > 1:
        se = {
            d: float(marginals[:, i].std(ddof=1) / math.sqrt(permutations))
            for i, d in enumerate(order)
        }
    else:
        se = {d: 0.0 for d in order}
    full_mask = (1 << n) - 1
    return phi, se, memo.value(full_mask), memo.value(0)


def normalize_attribution(phi: dict[str, float], e_hat_full: float, e_full: float) -> dict[str, float]:
    """Rescale phi so the total matches the normalized full-coalition exposure."""
    if e_full == 0.0:
        return {d: 0.0 for d in phi}
    scale = e_hat_full / e_full
    return {d: v * scale for d, v in phi.items()}


def default_permutations(n_domains: int) -> int:
    return max(MC_MIN_PERMUTATIONS, 10 * n_domains * n_domains)


def attribute_values(
    domains: tuple[str, ...],
    value_fn: ValueFn,
    e_hat_full: float,
    method: str = "auto",
    permutations: int | None = None,
    seed: int = 0,
) -> AttributionResult:
    """Run the chosen estimator and package the result.

    ``method`` is "exact", "mc", or "auto" (exact up to 14 domains).
    """
    order = tuple(sorted(domains))
    if method == "auto":
        method = "exact" if len(order) <= EXACT_DOMAIN_CAP else "mc"
    if method == "exact":
        phi, grand, empty = shapley_exact_values(order, value_fn)
        se = None
        sampled = None
        label = "exact"
    elif method == "mc":
        m = permutations if permutations is not None else default_permutations(len(order))
        phi, se, grand, empty = shapley_mc_values(order, value_fn, m, seed)
        sampled = m
        label = "monte_carlo"
    else:
        raise ConfigurationError(f"unknown attribution method {method!r}")

    gap = abs(sum(phi.values()) - (grand - empty))
    return AttributionResult(
        phi=phi,
        method=label,
        efficiency_gap=gap,
        normalized_phi=normalize_attribution(phi, e_hat_full, grand),
        grand_value=grand,
        empty_value=empty,
        empty_overlap_flagged=empty != 0.0,
        permutations_sampled=sampled,
        standard_errors=se,
    )
