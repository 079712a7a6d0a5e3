"""Synthetic datasets used by tests, experiments and the benchmark script."""
import numpy as np


def make_uniform(n, dim, seed=None):
    rng = np.random.default_rng(seed)
    return rng.random((n, dim), dtype=np.float32)


def make_gaussian(n, dim, seed=None):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, dim), dtype=np.float32)


def make_clustered(n, dim, num_clusters=20, cluster_std=0.1, seed=None):
    """Gaussian blobs around uniformly placed centers in [0, 1)^dim.

    Points are assigned to clusters round-robin so every cluster is populated.
    Returns the float32 matrix only.
    """
    if num_clusters < 1:
        raise ValueError("num_clusters must be >= 1")
    rng = np.random.default_rng(seed)
    centers = rng.random((num_clusters, dim))
    assignment = np.arange(n) % num_clusters
    rng.shuffle(assignment)
    noise = rng.standard_normal((n, dim)) * cluster_std
    return (centers[assignment] + noise).astype(np.float32)
