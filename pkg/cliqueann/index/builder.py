"""Clique index construction by geometric densification.

Rounds sweep every still-uncovered node at a growing alpha. For a center u
the local candidate set is u plus its k'-NN row (super-centers removed); two
candidates are adjacent when their true distance is at most alpha * d_min,
d_min being u's distance to its nearest candidate. Greedy maximal cliques of
size >= tau are kept. Once alpha reaches alpha_max, a center left uncovered
turns its whole candidate set into a pseudo-clique.

Workers mine disjoint chunks of centers in numba kernels that release the
GIL. The coverage mask and clique counters are shared arrays written without
locks; each worker keeps its cliques private until the round is merged.
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numba
import numpy as np

from cliqueann.exceptions import BuildError, ParameterError
from cliqueann.index.clique_index import BuildMeta, Clique, CliqueIndex, CliqueKind
from cliqueann.knng.nn_descent import sq_dist
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class BuildParams:
    k_prime: int = 200
    tau: int = 50
    alpha0: float = 1.2
    alpha_expansion: float = 2.0
    alpha_max: float = 10.0
    supercenter_fraction: float = 0.01
    # floor on the super-center cap so small datasets are not pruned wholesale
    supercenter_min_cap: int = 8
    audit: bool = False
    chunk_size: int = 64

    def __post_init__(self):
        if self.alpha0 <= 1:
            raise ParameterError(f"alpha0 must be > 1, got {self.alpha0}")
        if self.alpha_expansion <= 1:
            raise ParameterError(f"alpha_expansion must be > 1, got {self.alpha_expansion}")
        if self.alpha_max < self.alpha0:
            raise ParameterError(f"alpha_max ({self.alpha_max}) must be >= alpha0 ({self.alpha0})")
        if self.tau < 2:
            raise ParameterError(f"tau must be >= 2, got {self.tau}")
        if self.k_prime < self.tau - 1:
            raise ParameterError(f"k_prime ({self.k_prime}) must be >= tau - 1 ({self.tau - 1})")
        if not 0 < self.supercenter_fraction <= 1:
            raise ParameterError(f"supercenter_fraction must be in (0, 1], got {self.supercenter_fraction}")
        if self.supercenter_min_cap < 1:
            raise ParameterError("supercenter_min_cap must be >= 1")
        if self.chunk_size < 1:
            raise ParameterError("chunk_size must be >= 1")

    def supercenter_cap(self, n: int) -> int:
        return max(math.ceil(self.supercenter_fraction * n), self.supercenter_min_cap)

    def max_rounds(self) -> int:
        return math.ceil(math.log(self.alpha_max / self.alpha0, self.alpha_expansion)) + 2


@dataclass
class MinedCliques:
    """Raw kernel output for one center: CSR cliques plus the candidate set."""

    offsets: np.ndarray
    pool: np.ndarray
    kinds: np.ndarray
    threshold: float
    candidates: np.ndarray
    excluded: int

    def cliques(self, alpha: float) -> List[Clique]:
        out = []
        for c in range(len(self.kinds)):
            kind = CliqueKind(int(self.kinds[c]))
            out.append(Clique(self.pool[self.offsets[c]:self.offsets[c + 1]], kind,
                              self.threshold if kind == CliqueKind.MINED else float("nan"), alpha))
        return out


@numba.njit(nogil=True, cache=True)
def greedy_clique_kernel(adj, seed):
    """Greedy maximal clique through ``seed`` on a dense boolean adjacency matrix.

    Repeatedly moves the candidate with most neighbors inside the candidate
    set (smallest index on ties) into the clique. Degrees are maintained
    incrementally as candidates drop out.
    """
    m = adj.shape[0]
    cand = adj[seed].copy()
    cand[seed] = False
    deg = np.zeros(m, dtype=np.int64)
    for u in range(m):
        if cand[u]:
            for w in range(m):
                if cand[w] and adj[u, w] and w != u:
                    deg[u] += 1
    clique = np.empty(m, dtype=np.int64)
    clique[0] = seed
    size = 1
    while True:
        best = -1
        best_deg = -1
        for u in range(m):
            if cand[u] and deg[u] > best_deg:
                best = u
                best_deg = deg[u]
        if best < 0:
            break
        clique[size] = best
        size += 1
        cand[best] = False
        for w in range(m):
            if cand[w] and not adj[best, w]:
                cand[w] = False
                for u in range(m):
                    if cand[u] and adj[u, w]:
                        deg[u] -= 1
        for u in range(m):
            if cand[u] and adj[u, best]:
                deg[u] -= 1
    return np.sort(clique[:size])


@numba.njit(nogil=True, cache=True)
def local_adjacency(data, cand, center_pos, alpha):
    """Adjacency of the local graph and its true-distance threshold."""
    m = cand.shape[0]
    d2 = np.zeros((m, m), dtype=np.float32)
    for a in range(m):
        for b in range(a + 1, m):
            d = sq_dist(data[cand[a]], data[cand[b]])
            d2[a, b] = d
            d2[b, a] = d
    d_min2 = np.inf
    for b in range(m):
        if b != center_pos and d2[center_pos, b] < d_min2:
            d_min2 = d2[center_pos, b]
    threshold = np.float32(alpha) * np.sqrt(np.float32(d_min2))
    adj = np.zeros((m, m), dtype=np.bool_)
    for a in range(m):
        for b in range(a + 1, m):
            d = d2[a, b]
            if d == 0.0 or np.sqrt(d) <= threshold:
                adj[a, b] = True
                adj[b, a] = True
    return adj, threshold


@numba.njit(nogil=True, cache=True)
def mine_center_kernel(center, neighbors, alpha, final, tau, cap, data, counts, covered):
    # candidate set: center plus neighbors not already in more than `cap` cliques
    keep = np.empty(neighbors.shape[0] + 1, dtype=np.int32)
    m = 0
    excluded = 0
    keep[m] = center
    m += 1
    for t in range(neighbors.shape[0]):
        v = neighbors[t]
        if v < 0 or v == center:
            continue
        if counts[v] > cap:
            excluded += 1
            continue
        keep[m] = v
        m += 1
    cand = np.sort(keep[:m])
    center_pos = 0
    for a in range(m):
        if cand[a] == center:
            center_pos = a

    offsets = np.zeros(m + 2, dtype=np.int64)
    pool = np.empty(m * m + m, dtype=np.int32)
    kinds = np.zeros(m + 1, dtype=np.uint8)
    n_cliques = 0
    threshold = np.float32(np.nan)
    if m > 1:
        adj, threshold = local_adjacency(data, cand, center_pos, alpha)
        for j in range(m):
            if covered[cand[j]] != 0:
                continue
            local = greedy_clique_kernel(adj, j)
            if local.shape[0] < tau:
                continue
            start = offsets[n_cliques]
            for t in range(local.shape[0]):
                v = cand[local[t]]
                pool[start + t] = v
                covered[v] = 1
                counts[v] += 1
            offsets[n_cliques + 1] = start + local.shape[0]
            n_cliques += 1
    if final and (n_cliques == 0 or covered[center] == 0):
        start = offsets[n_cliques]
        for t in range(m):
            v = cand[t]
            pool[start + t] = v
            covered[v] = 1
            counts[v] += 1
        offsets[n_cliques + 1] = start + m
        kinds[n_cliques] = 1
        n_cliques += 1
    return offsets[:n_cliques + 1], pool[:offsets[n_cliques]], kinds[:n_cliques], threshold, cand, excluded


def greedy_maximal_clique(adjacency, seed: int) -> np.ndarray:
    """Sorted local ids of the greedy maximal clique containing ``seed``."""
    adjacency = np.ascontiguousarray(adjacency, dtype=np.bool_)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise ParameterError(f"adjacency must be square, got shape {adjacency.shape}")
    if not 0 <= seed < adjacency.shape[0]:
        raise ParameterError(f"seed {seed} is not a node of the local graph")
    adjacency = adjacency | adjacency.T
    np.fill_diagonal(adjacency, False)
    return greedy_clique_kernel(adjacency, int(seed))


def mine_from(center: int, neighbors, alpha: float, covered: np.ndarray, counts: np.ndarray,
              data: np.ndarray, params: BuildParams, cap: int) -> MinedCliques:
    neighbors = np.ascontiguousarray(neighbors, dtype=np.int32)
    offsets, pool, kinds, threshold, cand, excluded = mine_center_kernel(
        int(center), neighbors, float(alpha), bool(alpha >= params.alpha_max),
        int(params.tau), int(cap), data, counts, covered)
    return MinedCliques(offsets, pool, kinds, float(threshold), cand, int(excluded))


def mine_cliques(center: int, alpha: float, covered: np.ndarray, dataset, knng, params: BuildParams,
                 counts: Optional[np.ndarray] = None) -> Tuple[List[Clique], np.ndarray]:
    """Mine cliques around one center; ``covered`` is updated in place and returned."""
    if alpha < params.alpha0:
        raise ParameterError(f"alpha ({alpha}) must be >= alpha0 ({params.alpha0})")
    data = np.ascontiguousarray(dataset.vectors, dtype=np.float32)
    if counts is None:
        counts = np.zeros(dataset.n, dtype=np.int32)
    mined = mine_from(center, knng.ids[center], alpha, covered, counts, data, params,
                      params.supercenter_cap(dataset.n))
    return mined.cliques(alpha), covered


def _mine_chunk(centers, knn_ids, alpha, covered, counts, data, params, cap):
    out = []
    for u in centers:
        # another worker may have covered it since the round started
        if covered[u]:
            continue
        out.append(mine_from(u, knn_ids[u], alpha, covered, counts, data, params, cap))
    return out


def build(dataset, knng, params: Optional[BuildParams] = None, threads: int = 1) -> CliqueIndex:
    params = params or BuildParams()
    n = dataset.n
    if n == 0:
        raise ParameterError("cannot build an index over an empty dataset")
    if knng.n != n:
        raise ParameterError(f"k'-NN graph has {knng.n} rows, dataset has {n} vectors")
    k_eff = knng.k_prime
    if k_eff != params.k_prime:
        logger.warning("k'-NN graph width %d differs from k_prime=%d; using %d", k_eff, params.k_prime, k_eff)
    if params.tau > k_eff + 1:
        logger.warning("tau=%d exceeds k'+1=%d, pseudo-cliques will dominate the index", params.tau, k_eff + 1)
    threads = max(1, int(threads))

    data = np.ascontiguousarray(dataset.vectors, dtype=np.float32)
    knn_ids = np.ascontiguousarray(knng.ids, dtype=np.int32)
    covered = np.zeros(n, dtype=np.uint8)
    counts = np.zeros(n, dtype=np.int32)
    cap = params.supercenter_cap(n)
    meta = BuildMeta(n=n, k_prime=k_eff, tau=params.tau, supercenter_cap=cap, threads=threads)
    index = CliqueIndex(n, params.tau, k_eff, [], build_meta=meta)

    started = time.perf_counter()
    alpha = params.alpha0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while True:
            pending = np.flatnonzero(covered == 0)
            if len(pending) == 0:
                break
            if meta.rounds >= params.max_rounds():
                raise BuildError(f"build did not converge within {meta.rounds} rounds",
                                 details={"rounds": meta.rounds, "uncovered": int(len(pending))})
            chunks = [pending[i:i + params.chunk_size] for i in range(0, len(pending), params.chunk_size)]
            if pool is None:
                results = [_mine_chunk(c, knn_ids, alpha, covered, counts, data, params, cap) for c in chunks]
            else:
                results = list(pool.map(
                    lambda c: _mine_chunk(c, knn_ids, alpha, covered, counts, data, params, cap), chunks))
            mined_this_round = 0
            for chunk_result in results:
                for mined in chunk_result:
                    meta.supercenter_exclusions += mined.excluded
                    for clique in mined.cliques(alpha):
                        index.add_clique(clique, mined.candidates if params.audit else None)
                        mined_this_round += 1
                        if clique.kind == CliqueKind.PSEUDO:
                            meta.pseudo_count += 1
            uncovered = float(np.count_nonzero(covered == 0)) / n
            meta.rounds += 1
            meta.alpha_schedule.append(float(alpha))
            meta.trace.append((float(alpha), uncovered))
            logger.info("round %d alpha=%.3g centers=%d cliques=%d uncovered=%.4f",
                        meta.rounds, alpha, len(pending), mined_this_round, uncovered)
            alpha *= params.alpha_expansion
    finally:
        if pool is not None:
            pool.shutdown()

    if index.total_members > index.size_bound:
        raise BuildError(f"index holds {index.total_members} members, bound is {index.size_bound}",
                         details={"total_members": index.total_members, "size_bound": index.size_bound})
    meta.elapsed_seconds = time.perf_counter() - started
    if meta.supercenter_exclusions:
        logger.debug("super-center cap %d excluded %d candidate slots", cap, meta.supercenter_exclusions)
    logger.info("built %r in %.2fs", index, meta.elapsed_seconds)
    return index
