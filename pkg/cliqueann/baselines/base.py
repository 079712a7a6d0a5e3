from abc import ABC, abstractmethod

from cliqueann.search.beam import SearchParams, SearchResult, query_rng, search


class FilteredSearcher(ABC):
    """Common interface so benchmark loops can swap search strategies."""

    name = "abstract"

    def __init__(self, dataset, k: int = 10):
        self.dataset = dataset
        self.k = int(k)
        assert self.k >= 1, "k must be positive"

    @abstractmethod
    def query(self, query, mask=None, qi: int = 0) -> SearchResult:
        pass


class MCISearcher(FilteredSearcher):
    """Clique-index search behind the common interface."""

    name = "mci"

    def __init__(self, index, dataset, params: SearchParams):
        super().__init__(dataset, params.k)
        self.index = index
        self.params = params

    def query(self, query, mask=None, qi=0):
        return search(self.index, self.dataset, query, self.params, mask=mask,
                      rng=query_rng(self.params.rng_seed, qi))
