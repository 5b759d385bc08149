"""All-walks exposure via a damped Katz-style resolvent.

The walk matrix carries target-node attributes: ``W[u, v] = p_uv * (1 - R_v)
* w_v`` for each merged active edge. A coalition masks columns, keeping only
walks that step onto nodes owning at least one coalition domain. Exposure is
``a^T (I - alpha W_S)^{-1} b`` with ``a`` the entry indicator and ``b`` the
crown impact vector: every walk from an entry to a crown contributes, damped
geometrically by length.

The damping factor is ``alpha = kappa / rho(W_D)`` with the spectral radius
taken once per scoring run on the full-coalition matrix; a nilpotent matrix
(acyclic graph) has ``rho = 0`` and uses ``alpha = kappa`` directly. Because
column masking can only shrink the spectral radius of a nonnegative matrix,
the resolvent then converges for every sub-coalition.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .config import Coalition, ScoringContext
from .errors import StructuralError
from .graph import AssetGraph, GraphIndex


def spectral_radius(
    W: sparse.spmatrix | np.ndarray,
    max_iter: int = 1000,
    tol: float = 1e-9,
    seed: int = 0,
) -> tuple[float, bool]:
    """Largest eigenvalue magnitude of a nonnegative matrix, by power iteration.

    Phase one runs unshifted and detects exact collapse to zero: for a
    nonnegative nilpotent matrix the iterate hits exactly 0 within n steps
    (no cancellation), so acyclic graphs report exactly 0.0. Phase two adds
    a diagonal shift ``sigma`` before iterating; for nonnegative W,
    ``rho(W + sigma I) = rho(W) + sigma``, and the shift breaks the
    periodicity that stalls plain power iteration on e.g. a pure 2-cycle.
    """
    W = sparse.csr_matrix(W)
    n = W.shape[0]
    if n == 0:
        return 0.0, True
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 1.0, size=n)
    x /= np.linalg.norm(x)

    for _ in range(min(n + 1, max_iter // 2)):
        y = W @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0, True
        x = y / norm

    row_sums = np.asarray(np.abs(W).sum(axis=1)).ravel()
    sigma = 0.05 * float(row_sums.max())
    shifted = W + sigma * sparse.identity(n, format="csr")

    x = rng.uniform(0.5, 1.0, size=n)
    x /= np.linalg.norm(x)
    estimate = 0.0
    converged = False
    for _ in range(max_iter):
        y = shifted @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0, True
        if abs(norm - estimate) <= tol * max(norm, 1.0):
            estimate = norm
            converged = True
            break
        estimate = norm
        x = y / norm
    return max(estimate - sigma, 0.0), converged


class KatzScorer:
    """Reusable all-walks scorer with a per-run damping factor."""

    def __init__(self, graph: AssetGraph, ctx: ScoringContext, alpha: float | None = None):
        self.graph = graph
        self.ctx = ctx
        self.index = GraphIndex(graph)
        n = self.index.n_nodes

        weakness = 1.0 - self.index.resistance
        dst = self.index.edge_dst
        self._edge_vals = self.index.edge_p * weakness[dst] * self.index.weight[dst]

        self._membership_full = np.array(
            [1.0 if graph.nodes[nid].domains & ctx.full_coalition else 0.0 for nid in self.index.ids]
        )

        self.a = np.zeros(n)
        for e in ctx.entries:
            self.a[self.index.pos[e]] = 1.0
        self.b = np.zeros(n)
        for c in ctx.crowns:
            self.b[self.index.pos[c]] = ctx.impacts[c]

        if alpha is None:
            W_full = self._walk_matrix(self._membership_full)
            rho, converged = spectral_radius(W_full)
            if not converged:
                raise StructuralError("spectral radius estimate did not converge")
            self.rho = rho
            kappa = ctx.config.katz_kappa
            self.alpha = kappa if rho == 0.0 else kappa / rho
        else:
            self.rho = None
            self.alpha = float(alpha)

    def _membership(self, coalition: Coalition) -> np.ndarray:
        return np.array(
            [1.0 if self.graph.nodes[nid].domains & coalition else 0.0 for nid in self.index.ids]
        )

    def _walk_matrix(self, membership: np.ndarray) -> sparse.csr_matrix:
        vals = self._edge_vals * membership[self.index.edge_dst]
        n = self.index.n_nodes
        return sparse.csr_matrix(
            (vals, (self.index.edge_src, self.index.edge_dst)), shape=(n, n)
        )

    def exposure(self, coalition: Coalition | None = None) -> float:
        """Resolvent route: direct sparse solve of (I - alpha W_S) x = b."""
        if coalition is None:
            coalition = self.ctx.full_coalition
        W = self._walk_matrix(self._membership(coalition))
        n = self.index.n_nodes
        A = sparse.identity(n, format="csc") - self.alpha * W.tocsc()
        x = spsolve(A, self.b)
        return float(self.a @ np.atleast_1d(x))

    def series_exposure(
        self,
        coalition: Coalition | None = None,
        max_terms: int = 10_000,
        rel_tol: float = 1e-14,
    ) -> float:
        """Independent check: sum the walk series term by term."""
        if coalition is None:
            coalition = self.ctx.full_coalition
        W = self._walk_matrix(self._membership(coalition))
        term = self.b.copy()
        acc = self.b.copy()
        for _ in range(max_terms):
            term = self.alpha * (W @ term)
            acc += term
            tnorm = float(np.linalg.norm(term))
            if tnorm <= rel_tol * max(float(np.linalg.norm(acc)), 1.0):
                break
        return float(self.a @ acc)


def exposure_katz(
    graph: AssetGraph,
    ctx: ScoringContext,
    coalition: Coalition | None = None,
    alpha: float | None = None,
) -> float:
    return KatzScorer(graph, ctx, alpha=alpha).exposure(coalition)
