"""Streaming enumeration of bicluster structures in canonical form.

Row and column memberships are set partitions encoded as restricted growth
strings (RGS): labels start at 1 and each new label is the smallest unused
integer, capped at the maximum part count.  The full structure stream is the
cartesian product, row RGS varying slowest, each side in lexicographic order,
so downstream tie-breaking is deterministic.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import BlockStructure


def iter_rgs(m: int, max_parts: int) -> Iterator[np.ndarray]:
    """Yield every length-m RGS with at most max_parts parts, lexicographically.

    The yielded array is reused between iterations; callers that keep a
    reference must copy.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if max_parts < 1 or max_parts > m:
        raise ValueError(f"max_parts must be in [1, {m}], got {max_parts}")
    labels = np.ones(m, dtype=np.int64)
    # prefix_max[t] = max(labels[0..t]) maintained incrementally
    prefix_max = np.ones(m, dtype=np.int64)
    while True:
        yield labels
        # find rightmost position that can be incremented
        t = m - 1
        while t > 0:
            if labels[t] < min(prefix_max[t - 1] + 1, max_parts):
                break
            t -= 1
        if t == 0:
            return
        labels[t] += 1
        prefix_max[t] = max(prefix_max[t - 1], labels[t])
        for s in range(t + 1, m):
            labels[s] = 1
            prefix_max[s] = prefix_max[t]


def rgs_matrix(m: int, max_parts: int) -> np.ndarray:
    """All RGS of length m with <= max_parts parts, stacked as 0-based rows."""
    rows = [labels.copy() - 1 for labels in iter_rgs(m, max_parts)]
    return np.ascontiguousarray(np.stack(rows), dtype=np.int64)


def iter_structures(n: int, p: int, K: int, H: int,
                    shard: tuple[int, int] | None = None) -> Iterator[BlockStructure]:
    """Every canonical structure with at most K x H blocks, exactly once.

    ``shard=(i, m)`` keeps only row partitions with index congruent to i mod
    m, so m independent consumers cover the family disjointly for parallel
    exhaustive search.
    """
    _validate_caps(n, p, K, H)
    if shard is not None:
        index, modulus = shard
        if modulus < 1 or not 0 <= index < modulus:
            raise ValueError(f"shard must satisfy 0 <= i < m, got {shard}")
    for row_idx, r in enumerate(iter_rgs(n, K)):
        if shard is not None and row_idx % shard[1] != shard[0]:
            continue
        r_frozen = r.copy()
        for c in iter_rgs(p, H):
            yield BlockStructure(r_frozen, c.copy(), K, H)


def _validate_caps(n: int, p: int, K: int, H: int):
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    if not (1 <= K <= n):
        raise ValueError(f"K must be in [1, n={n}], got {K}")
    if not (1 <= H <= p):
        raise ValueError(f"H must be in [1, p={p}], got {H}")


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind (exact integer)."""
    if k < 0 or k > n:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def count_partitions(m: int, max_parts: int) -> int:
    """Number of set partitions of m items into at most max_parts parts."""
    return sum(stirling2(m, k) for k in range(1, max_parts + 1))


def count_structures(n: int, p: int, K: int, H: int, exact_blocks: bool = False) -> int:
    """Size of the structure family; with exact_blocks, require exactly K and H parts."""
    _validate_caps(n, p, K, H)
    if exact_blocks:
        return stirling2(n, K) * stirling2(p, H)
    return count_partitions(n, K) * count_partitions(p, H)


def exact_count_lower_bound(n: int, p: int, K: int, H: int) -> int:
    """Exponential lower bound K**(n-K) * H**(p-H) on the exact-block count."""
    return K ** (n - K) * H ** (p - H)
