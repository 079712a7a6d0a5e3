from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from cliqueann.core.distance import check_finite
from cliqueann.core.predicates import AlwaysTrue
from cliqueann.exceptions import DimensionError
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)


class Features(ABC):
    """Per-vector feature payloads; payload i belongs to vector i."""

    kind = "abstract"

    @abstractmethod
    def __len__(self) -> int:
        pass

    @abstractmethod
    def take(self, i: int) -> Any:
        """Payload of one node."""

    @abstractmethod
    def append(self, payload: Any) -> None:
        pass


class ScalarFeatures(Features):
    kind = "scalar"

    def __init__(self, values):
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        self._values = values.copy()
        self._size = len(values)

    @property
    def values(self) -> np.ndarray:
        return self._values[:self._size]

    def __len__(self):
        return self._size

    def take(self, i):
        return float(self._values[i])

    def append(self, payload):
        if self._size == len(self._values):
            grown = np.empty(max(16, 2 * len(self._values)), dtype=np.float64)
            grown[:self._size] = self._values[:self._size]
            self._values = grown
        self._values[self._size] = float(payload)
        self._size += 1


class LabelFeatures(Features):
    """Label sets in CSR layout with a lazily built posting list per label."""

    kind = "labels"

    def __init__(self, offsets, labels):
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.offsets.ndim != 1 or len(self.offsets) < 1 or self.offsets[0] != 0 \
                or self.offsets[-1] != len(self.labels) or np.any(np.diff(self.offsets) < 0):
            raise DimensionError("label offsets are not a valid CSR offset array")
        self._postings: Optional[Dict[int, np.ndarray]] = None

    @classmethod
    def from_single(cls, labels):
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        return cls(np.arange(len(labels) + 1, dtype=np.int64), labels)

    @classmethod
    def from_lists(cls, label_lists: Iterable[Iterable[int]]):
        rows = [sorted(set(int(x) for x in row)) for row in label_lists]
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(r) for r in rows])
        flat = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(offsets[-1]))
        return cls(offsets, flat)

    def __len__(self):
        return len(self.offsets) - 1

    def take(self, i):
        return frozenset(int(x) for x in self.labels[self.offsets[i]:self.offsets[i + 1]])

    def append(self, payload):
        extra = np.asarray(sorted(set(int(x) for x in np.atleast_1d(payload))), dtype=np.int64)
        self.labels = np.concatenate([self.labels, extra])
        self.offsets = np.append(self.offsets, self.offsets[-1] + len(extra))
        self._postings = None

    def posting(self, label: int) -> np.ndarray:
        """Ascending ids of nodes carrying ``label``."""
        if self._postings is None:
            owners = np.repeat(np.arange(len(self), dtype=np.int64), np.diff(self.offsets))
            order = np.lexsort((owners, self.labels))
            sorted_labels = self.labels[order]
            sorted_owners = owners[order]
            keys, starts = np.unique(sorted_labels, return_index=True)
            bounds = np.append(starts, len(sorted_labels))
            self._postings = {
                int(key): sorted_owners[bounds[j]:bounds[j + 1]]
                for j, key in enumerate(keys)
            }
        return self._postings.get(int(label), np.empty(0, dtype=np.int64))

    def label_counts(self) -> Dict[int, int]:
        keys, counts = np.unique(self.labels, return_counts=True)
        return {int(k): int(c) for k, c in zip(keys, counts)}


class BytesFeatures(Features):
    """Opaque payloads interpreted only by a user callback."""

    kind = "bytes"

    def __init__(self, payloads: Sequence[bytes]):
        self.payloads: List[bytes] = [bytes(p) for p in payloads]

    def __len__(self):
        return len(self.payloads)

    def take(self, i):
        return self.payloads[i]

    def append(self, payload):
        self.payloads.append(bytes(payload))


class Dataset:
    """n fixed-dimension float32 vectors plus optional per-vector features.

    Readers treat a Dataset as immutable. ``append`` is reserved for the single
    writer that performs index updates.
    """

    def __init__(self, vectors, features: Optional[Features] = None):
        vectors = np.array(vectors, dtype=np.float32, copy=True, order="C")
        if vectors.ndim != 2:
            raise DimensionError(f"expected an n x dim matrix, got shape {vectors.shape}")
        n, dim = vectors.shape
        if n < 1 or dim < 1:
            raise DimensionError(f"dataset needs n >= 1 and dim >= 1, got n={n}, dim={dim}")
        check_finite(vectors, "dataset")
        if features is not None and len(features) != n:
            raise DimensionError(
                f"features length {len(features)} does not match n={n}",
                details={"expected": n, "got": len(features)},
            )
        self._buffer = vectors
        self._n = n
        self.dim = dim
        self.features = features

    @property
    def n(self) -> int:
        return self._n

    @property
    def vectors(self) -> np.ndarray:
        return self._buffer[:self._n]

    def __len__(self):
        return self._n

    def row(self, i: int) -> np.ndarray:
        return self._buffer[i]

    def with_features(self, features: Optional[Features]) -> "Dataset":
        """New Dataset over the same vectors (copied) with another feature column."""
        return Dataset(self.vectors, features)

    def append(self, vector, feature: Any = None) -> int:
        """Append one vector (and its feature) and return its node id."""
        vector = np.asarray(vector, dtype=np.float32).reshape(-1)
        if vector.shape[0] != self.dim:
            raise DimensionError(
                f"vector has {vector.shape[0]} components, dataset dim is {self.dim}",
                details={"expected": self.dim, "got": int(vector.shape[0])},
            )
        check_finite(vector)
        if self._n == self._buffer.shape[0]:
            new_capacity = max(16, int(self._buffer.shape[0] * 1.5) + 1)
            logger.debug("Growing vector matrix: %d -> %d", self._buffer.shape[0], new_capacity)
            grown = np.empty((new_capacity, self.dim), dtype=np.float32)
            grown[:self._n] = self._buffer[:self._n]
            self._buffer = grown
        self._buffer[self._n] = vector
        if self.features is not None:
            self.features.append(feature)
        self._n += 1
        return self._n - 1


@dataclass
class Query:
    vq: np.ndarray
    fq: Any = None
    predicate: Any = None

    def __post_init__(self):
        self.vq = np.asarray(self.vq, dtype=np.float32).reshape(-1)
        check_finite(self.vq, "query vector")
        if self.predicate is None:
            self.predicate = AlwaysTrue()

    def check_dim(self, dim: int) -> None:
        if self.vq.shape[0] != dim:
            raise DimensionError(
                f"query has {self.vq.shape[0]} components, dataset dim is {dim}",
                details={"expected": dim, "got": int(self.vq.shape[0])},
            )
