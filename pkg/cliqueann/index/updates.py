"""Insertion and deletion on a built index (single writer).

Insertion attaches the new node to the cliques that overlap its approximate
neighborhood R in at least ceil(sqrt(|C|)) members, at most k' of them (most
overlap first) so the index stays within n * (k' + 1) members. When none
qualifies a clique is mined from R plus the node, escalating alpha up to the
pseudo-clique fallback. Deletion removes the node from its cliques; a clique
that falls below tau is dissolved and mining runs around each of its
remaining members, which re-covers any member left without a clique.
"""
import math
from typing import List, Optional

import numpy as np

from cliqueann.core.dataset import Query
from cliqueann.core.predicates import PredicateMask
from cliqueann.index.builder import BuildParams, mine_from
from cliqueann.index.clique_index import Clique, CliqueIndex, CliqueKind
from cliqueann.search.beam import SearchParams, search
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)


class IndexUpdater:
    def __init__(self, index: CliqueIndex, dataset, params: Optional[BuildParams] = None, rng_seed: int = 0):
        self.index = index
        self.dataset = dataset
        self.params = params or BuildParams(k_prime=max(index.k_prime, index.tau - 1), tau=index.tau)
        self.rng = np.random.default_rng(rng_seed)

    def _neighbors(self, u: int) -> np.ndarray:
        """Approximate k' nearest live neighbors of node u (u excluded)."""
        index = self.index
        bits = index.live.copy()
        bits[u] = False
        valid = int(np.count_nonzero(bits))
        if valid == 0 or index.k_prime == 0:
            return np.empty(0, dtype=np.int32)
        k = min(index.k_prime, valid)
        params = SearchParams(k=k, l_s=max(k, index.k_prime), epsilon=1.0)
        result = search(index, self.dataset, Query(self.dataset.row(u)), params,
                        mask=PredicateMask.from_bits(bits), rng=self.rng)
        return result.ids.astype(np.int32)

    def _clique_counts(self) -> np.ndarray:
        return np.fromiter((len(c) for c in self.index.node_to_cliques), dtype=np.int32, count=self.index.n)

    def _coverage(self) -> np.ndarray:
        covered = (self._clique_counts() > 0).astype(np.uint8)
        covered[self.index.deleted] = 1
        return covered

    def _mine_until_covered(self, u: int, neighbors: np.ndarray) -> List[int]:
        params = self.params
        data = np.ascontiguousarray(self.dataset.vectors[:self.index.n], dtype=np.float32)
        covered = self._coverage()
        counts = self._clique_counts()
        cap = params.supercenter_cap(self.index.live_count)
        added = []
        alpha = params.alpha0
        while True:
            mined = mine_from(u, neighbors, alpha, covered, counts, data, params, cap)
            for clique in mined.cliques(alpha):
                added.append(self.index.add_clique(clique, mined.candidates if params.audit else None))
            if covered[u] or alpha >= params.alpha_max:
                break
            alpha *= params.alpha_expansion
        return added

    def insert(self, vector, feature=None) -> int:
        index = self.index
        u = self.dataset.append(vector, feature)
        index.grow(u + 1 - index.n)
        neighbors = self._neighbors(u)
        if len(neighbors) == 0:
            index.add_clique(Clique([u], CliqueKind.PSEUDO))
            index.build_meta.inserted += 1
            return u

        near = set(neighbors.tolist())
        overlaps = {}
        for v in neighbors.tolist():
            for c in index.node_to_cliques[v]:
                overlaps[c] = overlaps.get(c, 0) + 1
        qualifying = sorted(
            (c for c, hits in overlaps.items() if hits >= math.ceil(math.sqrt(len(index.cliques[c])))),
            key=lambda c: (-overlaps[c], c))
        for c in qualifying[:max(index.k_prime, 1)]:
            index.add_member(c, u)
        if not qualifying:
            added = self._mine_until_covered(u, neighbors)
            logger.debug("insert %d: no overlapping clique, mined %d new (|R|=%d)", u, len(added), len(near))
        index.build_meta.inserted += 1
        return u

    def delete(self, u: int) -> None:
        index = self.index
        index.mark_deleted(u)
        tau = index.tau
        survivors = []
        for c in list(index.node_to_cliques[u]):
            before = len(index.cliques[c])
            index.remove_member(c, u)
            after = len(index.cliques[c])
            if before >= tau > after > 0:
                members = index.cliques[c].members.tolist()
                for v in members:
                    index.remove_member(c, v)
                survivors.extend(members)
        for v in sorted(set(survivors)):
            self._mine_until_covered(v, self._neighbors(v))
        index.build_meta.deleted += 1


def insert_node(index: CliqueIndex, dataset, vector, feature=None, params: Optional[BuildParams] = None,
                rng_seed: int = 0) -> int:
    return IndexUpdater(index, dataset, params, rng_seed).insert(vector, feature)


def delete_node(index: CliqueIndex, dataset, u: int, params: Optional[BuildParams] = None,
                rng_seed: int = 0) -> None:
    IndexUpdater(index, dataset, params, rng_seed).delete(u)
