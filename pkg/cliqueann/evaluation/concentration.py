"""Empirical check of neighbor transitivity under distance concentration.

For iid Gaussian points, if the pairwise-distance ratio mu/sigma exceeds
sqrt(2 ln n), two neighbors v, w of a center u that lie within alpha times
u's nearest-neighbor distance of each other are expected to be k-NN of
each other as well. The probe measures how often that happens.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from cliqueann.exceptions import ParameterError


@dataclass
class ConcentrationResult:
    dim: int
    n: int
    mu_over_sigma: float
    threshold: float
    hypothesis: bool
    transitivity_rate: Optional[float]
    qualifying_pairs: int
    # standard error of the rate across sampled centers
    rate_stderr: Optional[float] = None


def _knn_ids(dist_row: np.ndarray, self_id: int, k: int) -> np.ndarray:
    row = dist_row.copy()
    row[self_id] = np.inf
    return np.argpartition(row, k - 1)[:k]


def concentration_probe(dim: int, n: int, k: int, alpha: float, trials: int, rng=None,
                        distance_pairs: int = 20000) -> ConcentrationResult:
    if dim < 2:
        raise ParameterError(f"dim must be >= 2, got {dim}")
    if not 1 <= k < n:
        raise ParameterError(f"k must be in [1, n), got k={k}, n={n}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    X = rng.standard_normal((n, dim))

    a = rng.integers(0, n, size=distance_pairs)
    b = rng.integers(0, n, size=distance_pairs)
    keep = a != b
    d = np.linalg.norm(X[a[keep]] - X[b[keep]], axis=1)
    mu_over_sigma = float(d.mean() / d.std())
    threshold = math.sqrt(2.0 * math.log(n))

    per_center = []
    for u in rng.choice(n, size=min(trials, n), replace=False).tolist():
        du = cdist(X[u:u + 1], X)[0]
        near = _knn_ids(du, u, k)
        nearest = float(du[near].min())
        limit = alpha * nearest
        hits = 0
        pairs = 0
        near_rows = cdist(X[near], X)
        local = near_rows[:, near]
        for i in range(k):
            neighbors_i = None
            for j in range(k):
                if i == j or local[i, j] > limit:
                    continue
                pairs += 1
                if neighbors_i is None:
                    neighbors_i = set(_knn_ids(near_rows[i], int(near[i]), k).tolist())
                # v = near[j] is a k-NN of w = near[i]
                if int(near[j]) in neighbors_i:
                    hits += 1
        per_center.append((hits, pairs))

    h, p = np.array(per_center, dtype=np.float64).reshape(-1, 2).T
    total = int(p.sum())
    if total == 0:
        return ConcentrationResult(dim, n, mu_over_sigma, threshold, mu_over_sigma > threshold, None, 0)
    rate = float(h.sum() / total)
    m = len(p)
    # ratio-estimator spread, centers as clusters of correlated pairs
    stderr = float(np.sqrt(np.sum((h - rate * p) ** 2) * m / max(m - 1, 1)) / total)
    return ConcentrationResult(dim, n, mu_over_sigma, threshold, mu_over_sigma > threshold, rate, total, stderr)
