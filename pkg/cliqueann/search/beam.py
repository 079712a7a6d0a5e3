"""Filtered top-k search over a clique index.

The beam R keeps the l_s closest predicate-true nodes seen so far, each with
an expanded flag. Expanding a node visits every clique containing it once,
computes distances to its unvisited valid members and streams them into R.
Search ends when every node in R has been expanded.
"""
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cliqueann.core.distance import squared_distances
from cliqueann.core.predicates import PredicateMask, evaluate_mask
from cliqueann.exceptions import DimensionError, ParameterError
from cliqueann.search.seeds import sample_seeds, sample_seeds_lazy
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class SearchParams:
    k: int = 10
    l_s: int = 100
    epsilon: float = 1.0
    rng_seed: int = 0
    lazy_predicate: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.l_s < self.k:
            raise ParameterError(f"l_s ({self.l_s}) must be >= k ({self.k})")
        if self.epsilon < 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass
class SearchStats:
    dist_comps: int = 0
    expanded: int = 0
    seeds: int = 0
    cliques_visited: int = 0


@dataclass
class SearchResult:
    ids: np.ndarray
    dists: np.ndarray
    stats: SearchStats = field(default_factory=SearchStats)

    def __len__(self):
        return len(self.ids)

    def pairs(self) -> List[Tuple[int, float]]:
        return list(zip(self.ids.tolist(), self.dists.tolist()))


class SearchState:
    """Beam R (sorted by (distance, node), capped at l_s), visited nodes and cliques."""

    def __init__(self, n: int, n_cliques: int, l_s: int):
        self.l_s = int(l_s)
        self.keys: List[Tuple[float, int]] = []
        self.expanded: List[bool] = []
        self.visited = np.zeros(n, dtype=bool)
        self.visited_cliques = np.zeros(n_cliques, dtype=bool)
        self.stats = SearchStats()

    def __len__(self):
        return len(self.keys)

    @property
    def R(self) -> List[Tuple[int, float, bool]]:
        return [(node, dist, flag) for (dist, node), flag in zip(self.keys, self.expanded)]

    def insert(self, node: int, dist: float) -> bool:
        """Insert in sorted position, dropping the farthest entry past l_s.

        Returns False when the node did not make the beam.
        """
        key = (float(dist), int(node))
        if len(self.keys) >= self.l_s and key >= self.keys[-1]:
            return False
        pos = bisect_left(self.keys, key)
        self.keys.insert(pos, key)
        self.expanded.insert(pos, False)
        if len(self.keys) > self.l_s:
            self.keys.pop()
            self.expanded.pop()
        return True

    def next_unexpanded(self) -> int:
        for pos, flag in enumerate(self.expanded):
            if not flag:
                return pos
        return -1

    def top(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        head = self.keys[:k]
        ids = np.fromiter((node for _, node in head), dtype=np.int64, count=len(head))
        dists = np.fromiter((d for d, _ in head), dtype=np.float32, count=len(head))
        return ids, dists


def _valid_bits(index, dataset, query, mask: Optional[PredicateMask]) -> np.ndarray:
    if mask is None:
        mask = evaluate_mask(dataset, query)
    bits = mask.bits[:index.n]
    if len(bits) < index.n:
        raise DimensionError(f"mask covers {len(bits)} nodes, index has {index.n}")
    return bits & index.live


def search(index, dataset, query, params: SearchParams, mask: Optional[PredicateMask] = None,
           rng=None) -> SearchResult:
    """Top-k predicate-true nodes for ``query``, ascending by squared distance."""
    query.check_dim(dataset.dim)
    if dataset.n < index.n:
        raise DimensionError(f"dataset has {dataset.n} vectors, index covers {index.n}")
    rng = rng if rng is not None else np.random.default_rng(params.rng_seed)
    n = index.n
    X = dataset.vectors
    vq = query.vq
    state = SearchState(n, index.clique_count, params.l_s)

    if params.lazy_predicate:
        predicate = query.predicate
        predicate.check_features(dataset.features)
        # -1 untested, 0 false, 1 true
        tested = np.full(n, -1, dtype=np.int8)
        tested[index.deleted] = 0

        def valid(u):
            if tested[u] < 0:
                tested[u] = 1 if predicate.test_node(dataset.features, u, query.fq) else 0
            return tested[u] == 1

        seeds = sample_seeds_lazy(valid, np.flatnonzero(index.live), params.epsilon, index.live_count, rng)

        def filter_valid(members):
            return np.asarray([u for u in members.tolist() if valid(u)], dtype=np.int64)
    else:
        bits = _valid_bits(index, dataset, query, mask)
        seeds = sample_seeds(bits, params.epsilon, index.live_count, rng)

        def filter_valid(members):
            return members[bits[members]]

    state.stats.seeds = len(seeds)
    if len(seeds):
        state.visited[seeds] = True
        dists = squared_distances(X[seeds], vq)
        state.stats.dist_comps += len(seeds)
        for u, d in zip(seeds.tolist(), dists.tolist()):
            state.insert(u, d)

    clique_offsets, member_pool, node_offsets, node_pool = index.flat()
    while True:
        pos = state.next_unexpanded()
        if pos < 0:
            break
        state.expanded[pos] = True
        state.stats.expanded += 1
        p = state.keys[pos][1]
        batch = []
        for c in node_pool[node_offsets[p]:node_offsets[p + 1]].tolist():
            if state.visited_cliques[c]:
                continue
            state.visited_cliques[c] = True
            state.stats.cliques_visited += 1
            members = member_pool[clique_offsets[c]:clique_offsets[c + 1]]
            members = members[~state.visited[members]]
            fresh = filter_valid(members)
            if len(fresh):
                state.visited[fresh] = True
                batch.append(fresh)
        if not batch:
            continue
        ids = np.concatenate(batch)
        dists = squared_distances(X[ids], vq)
        state.stats.dist_comps += len(ids)
        for u, d in zip(ids.tolist(), dists.tolist()):
            state.insert(u, d)

    ids, dists = state.top(params.k)
    return SearchResult(ids, dists, state.stats)


def query_rng(seed: int, qi: int):
    """Independent stream per query so batches are reproducible under threading."""
    return np.random.default_rng([int(seed), int(qi)])


def search_many(index, dataset, queries: Sequence, params: SearchParams, masks: Optional[Sequence] = None,
                threads: int = 1) -> List[SearchResult]:
    def run(qi):
        mask = None if masks is None else masks[qi]
        return search(index, dataset, queries[qi], params, mask=mask, rng=query_rng(params.rng_seed, qi))

    if threads > 1 and len(queries) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, range(len(queries))))
    return [run(qi) for qi in range(len(queries))]
