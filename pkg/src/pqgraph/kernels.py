"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Backend selection happens once at import: if the environment variable
``PQGRAPH_NO_NUMBA`` is set to a truthy value, or numba is unavailable, the
numpy implementations are used. Both implementations of each kernel consume
identical inputs (including pre-drawn uniform variates for the Monte Carlo
counter) and return bit-identical results, so the flag only changes speed.

Kernels:

* ``survival_products`` evaluates one coalition against a flattened path
  table: per-path compromise probability (base probability scaled by the
  coalition coverage fraction), then per-crown survival products.
* ``mc_count`` counts Monte Carlo samples in which at least one crown node
  is reached from an entry node across a weak-node / successful-edge
  realization. Every sample consumes one uniform per node and one per edge,
  strict ``<`` comparisons, so counts match across backends exactly.
"""

from __future__ import annotations

import os

import numpy as np

NO_NUMBA_ENV = "PQGRAPH_NO_NUMBA"


def _flag_disables_numba() -> bool:
    raw = os.environ.get(NO_NUMBA_ENV, "")
    return raw.strip().lower() not in ("", "0", "false", "no", "off")


try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag path instead
    numba = None
    _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA and not _flag_disables_numba()


def active_backend() -> str:
    return "numba" if USING_NUMBA else "numpy"


# -- coalition evaluation ----------------------------------------------------


def survival_products_numpy(
    offsets: np.ndarray,
    flat_masks: np.ndarray,
    base: np.ndarray,
    group_starts: np.ndarray,
    mask: int,
) -> np.ndarray:
    """Per-crown-group survival: prod over paths of (1 - base * chi).

    ``offsets`` (P+1) indexes node slots per path in ``flat_masks``; every
    path has at least two nodes so segments are non-empty. Paths are grouped
    contiguously by crown; ``group_starts`` (G+1) gives path-index bounds.
    """
    n_paths = len(offsets) - 1
    if n_paths == 0:
        return np.ones(0)
    hits = (flat_masks & np.int64(mask)) != 0
    counts = np.add.reduceat(hits.astype(np.float64), offsets[:-1])
    lengths = np.diff(offsets).astype(np.float64)
    p_path = base * (counts / lengths)
    return np.multiply.reduceat(1.0 - p_path, group_starts[:-1])


def _survival_products_py(offsets, flat_masks, base, group_starts, mask):
    n_groups = len(group_starts) - 1
    out = np.ones(n_groups)
    for g in range(n_groups):
        acc = 1.0
        for p in range(group_starts[g], group_starts[g + 1]):
            lo = offsets[p]
            hi = offsets[p + 1]
            cnt = 0
            for k in range(lo, hi):
                if flat_masks[k] & mask:
                    cnt += 1
            acc *= 1.0 - base[p] * (cnt / (hi - lo))
        out[g] = acc
    return out


# -- Monte Carlo reachability ------------------------------------------------


def mc_count_numpy(
    indptr: np.ndarray,
    targets: np.ndarray,
    edge_ok: np.ndarray,
    weak: np.ndarray,
    entry_idx: np.ndarray,
    crown_flag: np.ndarray,
) -> int:
    """Count samples with a live entry-to-crown route, via fixpoint sweeps.

    ``edge_ok`` is (samples, m) edge successes and ``weak`` (samples, n)
    node weaknesses for the whole chunk. A crown counts only when reached
    over at least one edge; a crown that happens to be an entry is not a
    compromise by itself.
    """
    n_samples, n = weak.shape
    if n_samples == 0:
        return 0
    edge_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    edge_dst = targets

    reach = np.zeros((n_samples, n), dtype=bool)
    reach[:, entry_idx] = weak[:, entry_idx]
    if len(edge_dst) == 0:
        return 0

    order = np.argsort(edge_dst, kind="stable")
    src_o = edge_src[order]
    dst_o = edge_dst[order]
    ok_o = edge_ok[:, order]
    dst_unique, dst_starts = np.unique(dst_o, return_index=True)

    while True:
        contrib = reach[:, src_o] & ok_o & weak[:, dst_o]
        landed = np.logical_or.reduceat(contrib, dst_starts, axis=1)
        new = reach.copy()
        new[:, dst_unique] |= landed
        if np.array_equal(new, reach):
            break
        reach = new

    crown_edge = crown_flag[dst_o]
    if not crown_edge.any():
        return 0
    hit = (reach[:, src_o[crown_edge]] & ok_o[:, crown_edge] & weak[:, dst_o[crown_edge]]).any(axis=1)
    return int(hit.sum())


def _mc_count_py(indptr, targets, edge_ok, weak, entry_idx, crown_flag):
    n_samples, n = weak.shape
    count = 0
    stack = np.empty(n, dtype=np.int64)
    visited = np.empty(n, dtype=np.bool_)
    for s in range(n_samples):
        visited[:] = False
        top = 0
        for k in range(entry_idx.shape[0]):
            e = entry_idx[k]
            if weak[s, e] and not visited[e]:
                visited[e] = True
                stack[top] = e
                top += 1
        hit = False
        while top > 0 and not hit:
            top -= 1
            u = stack[top]
            for j in range(indptr[u], indptr[u + 1]):
                v = targets[j]
                if edge_ok[s, j] and weak[s, v]:
                    if crown_flag[v]:
                        hit = True
                        break
                    if not visited[v]:
                        visited[v] = True
                        stack[top] = v
                        top += 1
        if hit:
            count += 1
    return count


# -- compiled variants -------------------------------------------------------

if _HAVE_NUMBA:
    survival_products_numba = numba.njit(cache=True)(_survival_products_py)
    _mc_count_numba_impl = numba.njit(cache=True)(_mc_count_py)

    def mc_count_numba(indptr, targets, edge_ok, weak, entry_idx, crown_flag) -> int:
        return int(_mc_count_numba_impl(indptr, targets, edge_ok, weak, entry_idx, crown_flag))

else:  # pragma: no cover
    survival_products_numba = None
    mc_count_numba = None


def survival_products(offsets, flat_masks, base, group_starts, mask: int) -> np.ndarray:
    if USING_NUMBA:
        return survival_products_numba(
            np.asarray(offsets, dtype=np.int64),
            np.asarray(flat_masks, dtype=np.int64),
            np.asarray(base, dtype=np.float64),
            np.asarray(group_starts, dtype=np.int64),
            np.int64(mask),
        )
    return survival_products_numpy(
        np.asarray(offsets, dtype=np.int64),
        np.asarray(flat_masks, dtype=np.int64),
        np.asarray(base, dtype=np.float64),
        np.asarray(group_starts, dtype=np.int64),
        mask,
    )


def mc_count(indptr, targets, edge_ok, weak, entry_idx, crown_flag) -> int:
    args = (
        np.asarray(indptr, dtype=np.int64),
        np.asarray(targets, dtype=np.int64),
        np.ascontiguousarray(edge_ok, dtype=np.bool_),
        np.ascontiguousarray(weak, dtype=np.bool_),
        np.asarray(entry_idx, dtype=np.int64),
        np.asarray(crown_flag, dtype=np.bool_),
    )
    if USING_NUMBA:
        return mc_count_numba(*args)
    return mc_count_numpy(*args)
