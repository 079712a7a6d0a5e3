from .base import FilteredSearcher, MCISearcher
from .postfilter import PostFilterSearcher, postfilter_search
from .prefilter import PreFilterSearcher, prefilter_bruteforce

__all__ = [
    "FilteredSearcher",
    "MCISearcher",
    "PreFilterSearcher",
    "PostFilterSearcher",
    "prefilter_bruteforce",
    "postfilter_search",
]
