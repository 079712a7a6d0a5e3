from .beam import SearchParams, SearchResult, SearchState, SearchStats, search, search_many
from .seeds import sample_seeds, sample_seeds_lazy

__all__ = [
    "SearchParams",
    "SearchResult",
    "SearchState",
    "SearchStats",
    "search",
    "search_many",
    "sample_seeds",
    "sample_seeds_lazy",
]
