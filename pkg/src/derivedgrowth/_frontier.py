"""Row-level deduplication for level-synchronous searches.

States are fixed-width canonical byte encodings stored as rows of a
``(N, width)`` uint8 array. Rows are bucketed by a 64-bit hash and every
bucket with more than one row is split by exact byte comparison, so the
result is exact; the hash only orders the work.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

_MIX = np.random.default_rng(0x5EED).integers(1, 2**63, size=4096, dtype=np.uint64) | np.uint64(1)


def row_hash(arr: np.ndarray) -> np.ndarray:
    n, width = arr.shape
    if width > len(_MIX):
        raise ValueError("state encodings wider than 4096 bytes are not supported")
    h = np.zeros(n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for j in range(width):
            h += arr[:, j].astype(np.uint64) * _MIX[j]
            h ^= h >> np.uint64(29)
    return h


def group_rows(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Label equal rows with the same group id.

    Returns ``(labels, n_groups)`` where ids are contiguous from 0 and
    ordered deterministically (by hash, then by bytes within a bucket).
    """
    n = arr.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0
    h = row_hash(arr)
    order = np.argsort(h, kind="stable")
    hs = h[order]
    starts = np.flatnonzero(np.r_[True, hs[1:] != hs[:-1]])
    ends = np.r_[starts[1:], n]
    # sub-rank inside each bucket; only buckets of size > 1 need work
    sub = np.zeros(n, dtype=np.int64)
    for s, e in zip(starts[(ends - starts) > 1], ends[(ends - starts) > 1]):
        rows = order[s:e]
        keys = [arr[r].tobytes() for r in rows]
        distinct = sorted(set(keys))
        rank = {k: i for i, k in enumerate(distinct)}
        sub[s:e] = [rank[k] for k in keys]
    bucket = np.cumsum(np.r_[True, hs[1:] != hs[:-1]]) - 1
    # combine (bucket, sub) into contiguous ids
    pair = bucket * (int(sub.max()) + 1) + sub
    _, ids_sorted = np.unique(pair, return_inverse=True)
    labels = np.empty(n, dtype=np.int64)
    labels[order] = ids_sorted
    return labels, int(ids_sorted.max()) + 1


def expand(oracle, states: np.ndarray, letters, masks=None, threads: int = 1):
    """Apply each letter to (a masked subset of) ``states``.

    Returns a list of ``(letter, source_indices, new_states)`` in the order of
    ``letters``; the thread count never affects the result.
    """

    def one(i):
        x = letters[i]
        if masks is None:
            src = np.arange(states.shape[0])
        else:
            src = np.flatnonzero(masks[i])
        return x, src, oracle.step_batch(states[src], x)

    if threads <= 1 or len(letters) == 1:
        return [one(i) for i in range(len(letters))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(len(letters))))
