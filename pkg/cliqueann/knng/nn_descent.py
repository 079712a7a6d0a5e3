"""NN-Descent approximate k'-NN graph construction.

Rows are kept sorted by (squared distance, id) with a "new" flag per entry.
Each iteration samples new forward neighbors, builds reverse lists, and runs
the local join over every node's candidate sets.
"""
import math

import numba
import numpy as np

from cliqueann.exceptions import ParameterError
from cliqueann.knng.exact import clamp_k_prime
from cliqueann.knng.graph import KnnGraph
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)

UPDATE_STOP_FRACTION = 0.001


@numba.njit(fastmath=False, nogil=True, cache=True)
def sq_dist(x, y):
    result = np.float32(0.0)
    for i in range(x.shape[0]):
        diff = x[i] - y[i]
        result += diff * diff
    return result


@numba.njit(nogil=True, cache=True)
def row_insert(ids, dists, flags, i, j, d):
    """Insert j into row i if it ranks among the k best; returns 1 on change."""
    k = ids.shape[1]
    if j == i or k == 0:
        return 0
    last = k - 1
    if d > dists[i, last] or (d == dists[i, last] and ids[i, last] >= 0 and j >= ids[i, last]):
        return 0
    for t in range(k):
        if ids[i, t] == j:
            return 0
    pos = 0
    while pos < k and (dists[i, pos] < d or (dists[i, pos] == d and 0 <= ids[i, pos] < j)):
        pos += 1
    for t in range(last, pos, -1):
        ids[i, t] = ids[i, t - 1]
        dists[i, t] = dists[i, t - 1]
        flags[i, t] = flags[i, t - 1]
    ids[i, pos] = j
    dists[i, pos] = d
    flags[i, pos] = True
    return 1


@numba.njit(nogil=True, cache=True)
def sample_into(src, start, stop, cap, out, out_len, stamp, v):
    """Append up to ``cap`` entries of src[start:stop] picked uniformly (partial shuffle)."""
    m = stop - start
    if m <= cap:
        for t in range(start, stop):
            c = src[t]
            if stamp[c] != v:
                stamp[c] = v
                out[out_len] = c
                out_len += 1
        return out_len
    pool = src[start:stop].copy()
    for t in range(cap):
        r = t + np.random.randint(0, m - t)
        tmp = pool[t]
        pool[t] = pool[r]
        pool[r] = tmp
        c = pool[t]
        if stamp[c] != v:
            stamp[c] = v
            out[out_len] = c
            out_len += 1
    return out_len


@numba.njit(nogil=True, cache=True)
def reverse_csr(lists, n):
    counts = np.zeros(n + 1, dtype=np.int64)
    for i in range(lists.shape[0]):
        for t in range(lists.shape[1]):
            j = lists[i, t]
            if j >= 0:
                counts[j + 1] += 1
    for i in range(n):
        counts[i + 1] += counts[i]
    pool = np.empty(counts[n], dtype=np.int32)
    fill = counts[:n].copy()
    for i in range(lists.shape[0]):
        for t in range(lists.shape[1]):
            j = lists[i, t]
            if j >= 0:
                pool[fill[j]] = i
                fill[j] += 1
    return counts, pool


@numba.njit(nogil=True, cache=True)
def nn_descent_kernel(data, k, iterations, fwd_cap, rev_cap, stop_updates, seed):
    np.random.seed(seed)
    n = data.shape[0]
    ids = np.full((n, k), -1, dtype=np.int32)
    dists = np.full((n, k), np.inf, dtype=np.float32)
    flags = np.ones((n, k), dtype=np.bool_)

    for i in range(n):
        filled = 0
        while filled < k:
            j = np.random.randint(0, n)
            if row_insert(ids, dists, flags, i, j, sq_dist(data[i], data[j])) == 1:
                filled += 1

    stamp = np.full(n, -1, dtype=np.int64)
    new_c = np.empty(fwd_cap + rev_cap, dtype=np.int32)
    old_c = np.empty(k + rev_cap, dtype=np.int32)
    rounds = 0
    for it in range(iterations):
        rounds += 1
        fwd_new = np.full((n, fwd_cap), -1, dtype=np.int32)
        fwd_old = np.full((n, k), -1, dtype=np.int32)
        for i in range(n):
            new_pos = np.empty(k, dtype=np.int64)
            n_new = 0
            for t in range(k):
                if flags[i, t]:
                    new_pos[n_new] = t
                    n_new += 1
                else:
                    fwd_old[i, t] = ids[i, t]
            take = min(n_new, fwd_cap)
            for s in range(take):
                r = s + np.random.randint(0, n_new - s)
                tmp = new_pos[s]
                new_pos[s] = new_pos[r]
                new_pos[r] = tmp
                fwd_new[i, s] = ids[i, new_pos[s]]
                flags[i, new_pos[s]] = False
        rnew_off, rnew = reverse_csr(fwd_new, n)
        rold_off, rold = reverse_csr(fwd_old, n)

        stamp[:] = -1
        updates = 0
        for v in range(n):
            # stamp 2v marks new candidates, 2v+1 old ones
            n_len = 0
            for t in range(fwd_cap):
                c = fwd_new[v, t]
                if c >= 0 and stamp[c] != 2 * v:
                    stamp[c] = 2 * v
                    new_c[n_len] = c
                    n_len += 1
            n_len = sample_into(rnew, rnew_off[v], rnew_off[v + 1], rev_cap, new_c, n_len, stamp, 2 * v)
            o_len = 0
            for t in range(k):
                c = fwd_old[v, t]
                if c >= 0 and stamp[c] != 2 * v and stamp[c] != 2 * v + 1:
                    stamp[c] = 2 * v + 1
                    old_c[o_len] = c
                    o_len += 1
            o_len = sample_into(rold, rold_off[v], rold_off[v + 1], rev_cap, old_c, o_len, stamp, 2 * v + 1)

            for a_i in range(n_len):
                a = new_c[a_i]
                if a == v:
                    continue
                d = sq_dist(data[v], data[a])
                updates += row_insert(ids, dists, flags, v, a, d)
                updates += row_insert(ids, dists, flags, a, v, d)
                for b_i in range(a_i + 1, n_len):
                    b = new_c[b_i]
                    if b == v:
                        continue
                    d = sq_dist(data[a], data[b])
                    updates += row_insert(ids, dists, flags, a, b, d)
                    updates += row_insert(ids, dists, flags, b, a, d)
                for b_i in range(o_len):
                    b = old_c[b_i]
                    if b == a or b == v:
                        continue
                    d = sq_dist(data[a], data[b])
                    updates += row_insert(ids, dists, flags, a, b, d)
                    updates += row_insert(ids, dists, flags, b, a, d)
        if updates < stop_updates:
            break
    return ids, dists, rounds


def nn_descent(dataset, k_prime: int, iterations: int = 12, sample_rate: float = 0.5, seed: int = 0) -> KnnGraph:
    """Approximate k'-NN graph.

    Each node samples ceil(sample_rate * k') of its new neighbors and as many
    reverse neighbors per list; ``sample_rate=1`` keeps every reverse neighbor.
    Stops after ``iterations`` rounds or when an iteration makes fewer than
    0.001 * n * k' list updates.
    """
    if iterations < 1:
        raise ParameterError(f"iterations must be >= 1, got {iterations}")
    if not 0.0 < sample_rate <= 1.0:
        raise ParameterError(f"sample_rate must be in (0, 1], got {sample_rate}")
    data = np.ascontiguousarray(dataset.vectors, dtype=np.float32)
    n = data.shape[0]
    k = clamp_k_prime(n, k_prime)
    fwd_cap = max(1, math.ceil(sample_rate * k))
    rev_cap = n if sample_rate >= 1.0 else fwd_cap
    stop_updates = UPDATE_STOP_FRACTION * n * k
    ids, dists, rounds = nn_descent_kernel(data, k, int(iterations), fwd_cap, rev_cap, stop_updates, int(seed))
    logger.info("NN-Descent finished after %d of %d iterations (n=%d, k'=%d)", rounds, iterations, n, k)
    return KnnGraph(ids, dists, k, method="nn-descent")
