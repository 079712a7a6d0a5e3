from .exact import EXACT_MAX_N, build_knng, exact_knn
from .graph import KnnGraph, NeighborList, graph_recall
from .nn_descent import nn_descent

__all__ = ["KnnGraph", "NeighborList", "graph_recall", "exact_knn", "nn_descent", "build_knng", "EXACT_MAX_N"]
