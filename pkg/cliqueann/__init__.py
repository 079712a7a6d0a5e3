"""Filtered approximate nearest neighbor search over a maximal clique index."""
from cliqueann.core import AlwaysTrue, Dataset, LabelMatch, Query, ScalarRange, evaluate_mask
from cliqueann.index import BuildParams, CliqueIndex, build
from cliqueann.knng import build_knng, exact_knn, nn_descent
from cliqueann.search import SearchParams, search

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Query",
    "AlwaysTrue",
    "ScalarRange",
    "LabelMatch",
    "evaluate_mask",
    "BuildParams",
    "CliqueIndex",
    "build",
    "build_knng",
    "exact_knn",
    "nn_descent",
    "SearchParams",
    "search",
]
