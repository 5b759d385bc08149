"""Backend equivalence for the numeric kernels.

The compiled and numpy implementations must return bit-identical results
on identical inputs; the env flag only ever changes speed.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from pqgraph import kernels
from pqgraph.kernels import (
    NO_NUMBA_ENV,
    _mc_count_py,
    _survival_products_py,
    mc_count,
    mc_count_numpy,
    survival_products,
    survival_products_numpy,
)

IMPLS_SURVIVAL = [survival_products_numpy, _survival_products_py]
IMPLS_MC = [mc_count_numpy, _mc_count_py]
if kernels.USING_NUMBA:
    IMPLS_SURVIVAL.append(kernels.survival_products_numba)
    IMPLS_MC.append(kernels.mc_count_numba)


def survival_case():
    # Two paths to one crown: chi = 1 and 0.5 under mask 0b01.
    offsets = np.array([0, 2, 4], dtype=np.int64)
    flat_masks = np.array([1, 1, 1, 2], dtype=np.int64)
    base = np.array([0.5, 0.4])
    group_starts = np.array([0, 2], dtype=np.int64)
    return offsets, flat_masks, base, group_starts


def test_survival_hand_value():
    offsets, flat_masks, base, group_starts = survival_case()
    out = survival_products(offsets, flat_masks, base, group_starts, 0b01)
    # (1 - 0.5*1) * (1 - 0.4*0.5) = 0.5 * 0.8
    assert out == pytest.approx([0.4], abs=1e-15)


def test_survival_empty_mask_is_no_compromise():
    offsets, flat_masks, base, group_starts = survival_case()
    out = survival_products(offsets, flat_masks, base, group_starts, 0)
    assert out == pytest.approx([1.0], abs=0)


def test_survival_no_paths():
    out = survival_products(
        np.array([0], dtype=np.int64),
        np.array([], dtype=np.int64),
        np.array([]),
        np.array([0], dtype=np.int64),
        1,
    )
    assert len(out) == 0


@pytest.mark.parametrize("seed", range(5))
def test_survival_backends_bit_identical(seed):
    rng = np.random.default_rng(seed)
    n_paths = int(rng.integers(1, 30))
    lengths = rng.integers(2, 7, size=n_paths)
    offsets = np.zeros(n_paths + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    flat_masks = rng.integers(0, 16, size=int(offsets[-1])).astype(np.int64)
    base = rng.uniform(0, 1, size=n_paths)
    cuts = np.sort(rng.choice(np.arange(1, n_paths), size=min(2, n_paths - 1), replace=False)) if n_paths > 1 else np.array([], dtype=np.int64)
    group_starts = np.concatenate(([0], cuts, [n_paths])).astype(np.int64)
    mask = int(rng.integers(0, 16))

    results = [
        np.asarray(impl(offsets, flat_masks, base, group_starts, np.int64(mask)))
        for impl in IMPLS_SURVIVAL
    ]
    for other in results[1:]:
        np.testing.assert_array_equal(results[0], other)


def chain_inputs(n_samples, rng):
    # a(entry) -> b(crown)
    indptr = np.array([0, 1, 1], dtype=np.int64)
    targets = np.array([1], dtype=np.int64)
    edge_ok = rng.random((n_samples, 1)) < 0.6
    weak = rng.random((n_samples, 2)) < 0.7
    entry_idx = np.array([0], dtype=np.int64)
    crown_flag = np.array([False, True])
    return indptr, targets, edge_ok, weak, entry_idx, crown_flag


def test_mc_count_matches_direct_formula():
    rng = np.random.default_rng(42)
    indptr, targets, edge_ok, weak, entry_idx, crown_flag = chain_inputs(500, rng)
    expected = int((weak[:, 0] & edge_ok[:, 0] & weak[:, 1]).sum())
    assert mc_count(indptr, targets, edge_ok, weak, entry_idx, crown_flag) == expected


def test_mc_entry_crown_overlap_needs_an_edge():
    # A weak entry that is itself a crown is not a compromise on its own.
    indptr = np.array([0, 0], dtype=np.int64)
    targets = np.array([], dtype=np.int64)
    edge_ok = np.ones((10, 0), dtype=bool)
    weak = np.ones((10, 1), dtype=bool)
    got = mc_count(indptr, targets, edge_ok, weak, np.array([0], dtype=np.int64), np.array([True]))
    assert got == 0


@pytest.mark.parametrize("seed", range(4))
def test_mc_backends_bit_identical(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(3, 9))
    density = 0.4
    adj = rng.random((n, n)) < density
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    targets = dst.astype(np.int64)

    n_samples = 200
    edge_ok = rng.random((n_samples, len(targets))) < 0.5
    weak = rng.random((n_samples, n)) < 0.6
    entry_idx = np.array([0], dtype=np.int64)
    crown_flag = np.zeros(n, dtype=bool)
    crown_flag[n - 1] = True

    counts = {
        impl.__name__: impl(indptr, targets, edge_ok, weak, entry_idx, crown_flag)
        for impl in IMPLS_MC
    }
    assert len(set(counts.values())) == 1, counts


def test_env_flag_switches_backend():
    env = dict(os.environ)
    env[NO_NUMBA_ENV] = "1"
    out = subprocess.run(
        [sys.executable, "-c", "from pqgraph.kernels import active_backend; print(active_backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_env_flag_falsy_values_keep_numba():
    env = dict(os.environ)
    env[NO_NUMBA_ENV] = "off"
    out = subprocess.run(
        [sys.executable, "-c", "from pqgraph.kernels import USING_NUMBA, _HAVE_NUMBA; print(USING_NUMBA == _HAVE_NUMBA)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "True"
