"""Small hand-built datasets with known clique covers.

six_point_dataset: two unit-edge tetrahedra sharing the edge (2, 4); with
k'=3 and tau=3 the cover is {0,1,2,4} and {2,3,4,5}.

nine_point_dataset: nine points in 9 dimensions whose 4-NN graph and local
graphs give, at alpha=1.2, {0,4,8} from center 0 and {1,2,4,6}, {1,2,7}
from center 2; centers 1, 3 and 5 mine nothing; at alpha=2.4 center 3
mines {1,2,3,4,5}.
"""
import math
import os

import numpy as np

from cliqueann.core.dataset import Dataset

RUN_SLOW = os.environ.get("CLIQUEANN_RUN_SLOW") == "1"


def six_point_vectors():
    r = math.sqrt(3.0) / 2.0
    theta = 2.0 * math.asin(1.0 / math.sqrt(3.0))
    return np.array([
        [0.0, r, 0.0],
        [0.0, r * math.cos(theta), r * math.sin(theta)],
        [-0.5, 0.0, 0.0],
        [0.0, -r, 0.0],
        [0.5, 0.0, 0.0],
        [0.0, -r * math.cos(theta), -r * math.sin(theta)],
    ], dtype=np.float32)


def six_point_dataset():
    return Dataset(six_point_vectors())


def nine_point_vectors():
    h = 1.0 / math.sqrt(2.0)
    w = math.sqrt(0.91711)
    X = np.zeros((9, 9), dtype=np.float64)
    X[1, 0] = h
    X[2, 1] = h
    X[4, 2] = h
    X[6, 3] = h
    X[7, 0], X[7, 1], X[7, 4] = 0.5, 0.5, w
    X[5, 0], X[5, 5] = h, 0.7
    X[3, 0], X[3, 5], X[3, 6] = h, 0.7, 0.6
    X[0, 2], X[0, 7] = h, 0.5
    X[8, 2], X[8, 7], X[8, 8] = h, 0.3, math.sqrt(0.14)
    return X.astype(np.float32)


def nine_point_dataset():
    return Dataset(nine_point_vectors())


# 4-NN rows of the nine-point dataset as sets
NINE_POINT_KNN = {
    0: {1, 2, 4, 8},
    1: {2, 3, 4, 5},
    2: {1, 4, 6, 7},
    3: {1, 2, 4, 5},
    4: {0, 1, 2, 8},
    5: {1, 2, 3, 4},
    6: {1, 2, 4, 8},
    7: {1, 2, 4, 5},
    8: {0, 1, 2, 4},
}


def brute_force_knn(X, k):
    """Independent O(n^2) oracle: (ids, squared distances), ties by id."""
    X = np.asarray(X, dtype=np.float64)
    n = len(X)
    d = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    ids = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        others = np.array([j for j in range(n) if j != i])
        order = np.lexsort((others, d[i, others]))[:k]
        ids[i] = others[order]
    return ids, d


def brute_force_filtered(X, q, bits, k):
    """Second, loop-based filtered top-k used to cross-check the oracle."""
    X = np.asarray(X, dtype=np.float32)
    q = np.asarray(q, dtype=np.float32)
    scored = []
    for i in range(len(X)):
        if bits[i]:
            diff = X[i] - q
            scored.append((float(np.einsum("i,i->", diff, diff)), i))
    scored.sort()
    return [i for _, i in scored[:k]]
