"""Exact filtered top-k by scanning the predicate-true subset.

This is the ground-truth oracle for every recall number in the package.
"""
import numpy as np

from cliqueann.baselines.base import FilteredSearcher
from cliqueann.core.distance import squared_distances
from cliqueann.core.predicates import evaluate_mask
from cliqueann.search.beam import SearchResult, SearchStats


def prefilter_bruteforce(dataset, query, k: int, mask=None, live=None) -> SearchResult:
    """k smallest distances among valid nodes, ties broken by smaller id."""
    query.check_dim(dataset.dim)
    if mask is None:
        mask = evaluate_mask(dataset, query)
    bits = mask.restrict(live).bits
    valid = np.flatnonzero(bits)
    dists = squared_distances(dataset.vectors[valid], query.vq) if len(valid) else np.empty(0, np.float32)
    if len(valid) > k:
        kth = np.partition(dists, k - 1)[k - 1]
        keep = dists <= kth
        valid, dists = valid[keep], dists[keep]
    order = np.lexsort((valid, dists))[:k]
    return SearchResult(valid[order].astype(np.int64), dists[order],
                        SearchStats(dist_comps=int(np.count_nonzero(bits))))


class PreFilterSearcher(FilteredSearcher):
    name = "prefilter"

    def __init__(self, dataset, k=10, live=None):
        super().__init__(dataset, k)
        self.live = live

    def query(self, query, mask=None, qi=0):
        return prefilter_bruteforce(self.dataset, query, self.k, mask=mask, live=self.live)
