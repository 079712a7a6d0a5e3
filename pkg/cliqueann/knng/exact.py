"""Brute-force k'-NN graph; also the ground-truth oracle for graph quality."""
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial.distance import cdist

from cliqueann.exceptions import ParameterError
from cliqueann.knng.graph import KnnGraph
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)

EXACT_MAX_N = 20000


def clamp_k_prime(n: int, k_prime: int) -> int:
    if k_prime < 1:
        raise ParameterError(f"k_prime must be >= 1, got {k_prime}")
    if k_prime >= n:
        logger.warning("k_prime=%d >= n=%d, clamping to %d", k_prime, n, n - 1)
        return n - 1
    return int(k_prime)


def smallest_k(dist_row: np.ndarray, k: int) -> np.ndarray:
    """Ids of the k smallest entries, ascending by (distance, id)."""
    if k == 0:
        return np.empty(0, dtype=np.int64)
    kth = np.partition(dist_row, k - 1)[k - 1]
    cand = np.flatnonzero(dist_row <= kth)
    order = np.lexsort((cand, dist_row[cand]))
    return cand[order[:k]]


def exact_knn(dataset, k_prime: int, threads: int = 1, block_size: int = 512) -> KnnGraph:
    X = dataset.vectors.astype(np.float64)
    n = X.shape[0]
    k = clamp_k_prime(n, k_prime)
    ids = np.empty((n, k), dtype=np.int32)
    dists = np.empty((n, k), dtype=np.float32)

    def work(start):
        stop = min(n, start + block_size)
        block = cdist(X[start:stop], X, "sqeuclidean")
        block[np.arange(stop - start), np.arange(start, stop)] = np.inf
        for r in range(stop - start):
            sel = smallest_k(block[r], k)
            ids[start + r] = sel
            dists[start + r] = block[r, sel]

    starts = range(0, n, block_size)
    if threads > 1 and n > block_size:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)
    logger.debug("exact k'-NN graph: n=%d k'=%d blocks=%d", n, k, math.ceil(n / block_size))
    return KnnGraph(ids, dists, k, method="exact")


def build_knng(dataset, k_prime: int, method: str = "auto", threads: int = 1, **nn_descent_kwargs) -> KnnGraph:
    """Exact graph up to EXACT_MAX_N points, NN-Descent above (``method='auto'``)."""
    if method == "auto":
        method = "exact" if dataset.n <= EXACT_MAX_N else "nn-descent"
    if method == "exact":
        return exact_knn(dataset, k_prime, threads=threads)
    if method == "nn-descent":
        from cliqueann.knng.nn_descent import nn_descent
        return nn_descent(dataset, k_prime, **nn_descent_kwargs)
    raise ParameterError(f"unknown k'-NN graph method {method!r}")
