"""Unfiltered clique-index search followed by predicate rejection."""
import math

import numpy as np

from cliqueann.baselines.base import FilteredSearcher
from cliqueann.core.dataset import Query
from cliqueann.core.predicates import AlwaysTrue, PredicateMask
from cliqueann.exceptions import ParameterError
from cliqueann.search.beam import SearchParams, SearchResult, query_rng, search


def postfilter_search(index, dataset, query, k: int, expansion: float, epsilon: float = 1.0,
                      rng=None) -> SearchResult:
    """Fetch ceil(k * expansion) unfiltered candidates, keep the first k that pass."""
    if expansion < 1:
        raise ParameterError(f"expansion must be >= 1, got {expansion}")
    candidates = int(math.ceil(k * expansion))
    params = SearchParams(k=candidates, l_s=candidates, epsilon=epsilon)
    unfiltered = Query(query.vq, query.fq, AlwaysTrue())
    result = search(index, dataset, unfiltered, params,
                    mask=PredicateMask(np.ones(index.n, dtype=bool), index.n), rng=rng)
    predicate = query.predicate
    keep = np.fromiter((predicate.test_node(dataset.features, u, query.fq) for u in result.ids.tolist()),
                       dtype=bool, count=len(result.ids))
    ids = result.ids[keep][:k]
    dists = result.dists[keep][:k]
    return SearchResult(ids, dists, result.stats)


class PostFilterSearcher(FilteredSearcher):
    name = "postfilter"

    def __init__(self, index, dataset, k=10, expansion=4.0, epsilon=1.0, rng_seed=0):
        super().__init__(dataset, k)
        self.index = index
        self.expansion = expansion
        self.epsilon = epsilon
        self.rng_seed = rng_seed

    def query(self, query, mask=None, qi=0):
        return postfilter_search(self.index, self.dataset, query, self.k, self.expansion, self.epsilon,
                                 rng=query_rng(self.rng_seed, qi))

