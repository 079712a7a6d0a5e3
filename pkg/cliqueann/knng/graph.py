from dataclasses import dataclass
from typing import List

import numpy as np

from cliqueann.exceptions import DimensionError


@dataclass
class NeighborList:
    node: int
    ids: np.ndarray
    dists: np.ndarray

    def __len__(self):
        return len(self.ids)

    def pairs(self):
        return list(zip(self.ids.tolist(), self.dists.tolist()))


class KnnGraph:
    """Directed k'-NN graph stored as two n x k' arrays.

    Row u lists u's neighbors ascending by squared distance, ties by id.
    """

    def __init__(self, ids, dists, k_prime=None, method="exact"):
        self.ids = np.ascontiguousarray(ids, dtype=np.int32)
        self.dists = np.ascontiguousarray(dists, dtype=np.float32)
        if self.ids.ndim != 2 or self.ids.shape != self.dists.shape:
            raise DimensionError(f"neighbor ids {self.ids.shape} and distances {self.dists.shape} differ")
        self.k_prime = int(self.ids.shape[1] if k_prime is None else k_prime)
        self.method = method

    @property
    def n(self) -> int:
        return self.ids.shape[0]

    def neighbor_list(self, u: int) -> NeighborList:
        return NeighborList(int(u), self.ids[u], self.dists[u])

    @property
    def lists(self) -> List[NeighborList]:
        return [self.neighbor_list(u) for u in range(self.n)]

    def to_ivecs(self, path) -> None:
        """Debug dump: one ivecs record of k' neighbor ids per node."""
        from cliqueann.io.vecs import save_vecs
        save_vecs(path, self.ids, kind="i32")


def graph_recall(approx: KnnGraph, exact: KnnGraph, block_size: int = 1024) -> float:
    """Mean over nodes of |approx(u) & exact(u)| / k'."""
    if approx.ids.shape != exact.ids.shape:
        raise DimensionError(
            f"graph shapes differ: {approx.ids.shape} vs {exact.ids.shape}",
            details={"expected": list(exact.ids.shape), "got": list(approx.ids.shape)},
        )
    n, k = exact.ids.shape
    if n == 0 or k == 0:
        return 1.0
    hits = 0
    for start in range(0, n, block_size):
        a = approx.ids[start:start + block_size]
        e = exact.ids[start:start + block_size]
        # rows have no duplicates, so pairwise equality counts the intersection
        hits += int(np.count_nonzero(a[:, :, None] == e[:, None, :]))
    return hits / (n * k)
