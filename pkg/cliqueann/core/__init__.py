from .dataset import BytesFeatures, Dataset, Features, LabelFeatures, Query, ScalarFeatures
from .distance import distance, squared_distances
from .predicates import (
    AlwaysTrue,
    CallbackPredicate,
    ExternalMask,
    LabelMatch,
    LabelSubset,
    Predicate,
    PredicateMask,
    ScalarRange,
    evaluate_mask,
    parse_predicate,
    selectivity,
)

__all__ = [
    "Dataset",
    "Features",
    "ScalarFeatures",
    "LabelFeatures",
    "BytesFeatures",
    "Query",
    "distance",
    "squared_distances",
    "Predicate",
    "AlwaysTrue",
    "ScalarRange",
    "LabelMatch",
    "LabelSubset",
    "ExternalMask",
    "CallbackPredicate",
    "PredicateMask",
    "evaluate_mask",
    "selectivity",
    "parse_predicate",
]
