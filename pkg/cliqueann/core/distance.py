"""Squared Euclidean distance kernel.

Everything in the package compares squared L2 distances. Call sites that need
a true distance (the densification threshold) take the square root themselves.
"""
import numpy as np

from cliqueann.exceptions import DimensionError


def check_finite(values, what="vector"):
    if not np.all(np.isfinite(values)):
        raise DimensionError(f"{what} contains NaN or infinite components")


def squared_distances(vectors, q, accumulate64=False):
    """Squared distances from every row of ``vectors`` to ``q`` (float32).

    With ``accumulate64`` the products are summed in float64 and rounded once.
    """
    vectors = np.asarray(vectors, dtype=np.float32)
    q = np.asarray(q, dtype=np.float32)
    if vectors.ndim == 1:
        vectors = vectors[None, :]
    if q.ndim != 1 or vectors.shape[1] != q.shape[0]:
        raise DimensionError(
            f"dimension mismatch: rows have {vectors.shape[1]} components, query has {q.shape[-1]}",
            details={"expected": int(vectors.shape[1]), "got": int(q.shape[-1])},
        )
    diff = vectors - q
    if accumulate64:
        diff = diff.astype(np.float64)
    return np.einsum("ij,ij->i", diff, diff).astype(np.float32)


def distance(a, b, accumulate64=False):
    """Squared Euclidean distance between two vectors of equal length."""
    a = np.asarray(a, dtype=np.float32)
    b = np.asarray(b, dtype=np.float32)
    if a.ndim != 1 or b.ndim != 1 or a.shape[0] != b.shape[0]:
        raise DimensionError(
            f"dimension mismatch: {a.shape} vs {b.shape}",
            details={"expected": int(a.shape[-1]), "got": int(b.shape[-1])},
        )
    return float(squared_distances(a[None, :], b, accumulate64=accumulate64)[0])
