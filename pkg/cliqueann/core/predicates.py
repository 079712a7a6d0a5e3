"""Query predicates and their precomputed boolean masks."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, FrozenSet, Optional

import numpy as np

from cliqueann.exceptions import DimensionError, ParameterError, PredicateTypeError


class Predicate(ABC):
    """A test P(f_i, f_q) over one node's feature payload.

    ``evaluate`` is the vectorized form used to precompute masks, ``test`` the
    per-node form used to verify results and by lazy evaluation. Both must
    agree on every node.
    """

    kind = "abstract"
    # feature column kind required, None when any column (or none) is accepted
    feature_kind: Optional[str] = None

    def check_features(self, features) -> None:
        if self.feature_kind is None:
            return
        actual = None if features is None else features.kind
        if actual != self.feature_kind:
            raise PredicateTypeError(
                f"{self.kind} predicate needs '{self.feature_kind}' features, dataset has '{actual}'",
                details={"predicate": self.kind, "features": actual},
            )

    @abstractmethod
    def evaluate(self, features, fq: Any, n: int) -> np.ndarray:
        """Boolean array of length n."""

    @abstractmethod
    def test(self, payload: Any, fq: Any) -> bool:
        pass

    def test_node(self, features, i: int, fq: Any) -> bool:
        payload = None if features is None else features.take(i)
        return bool(self.test(payload, fq))

    def spec(self) -> Optional[str]:
        """Text form understood by ``parse_predicate``, None if not expressible."""
        return None


class AlwaysTrue(Predicate):
    kind = "always-true"

    def evaluate(self, features, fq, n):
        return np.ones(n, dtype=bool)

    def test(self, payload, fq):
        return True

    def test_node(self, features, i, fq):
        return True

    def spec(self):
        return "true"

    def __eq__(self, other):
        return isinstance(other, AlwaysTrue)

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return "AlwaysTrue()"


@dataclass(frozen=True)
class ScalarRange(Predicate):
    """low <= f_i <= high, both ends inclusive."""

    low: float
    high: float

    kind = "scalar-range"
    feature_kind = "scalar"

    def evaluate(self, features, fq, n):
        values = features.values
        return (values >= self.low) & (values <= self.high)

    def test(self, payload, fq):
        return self.low <= payload <= self.high

    def spec(self):
        return f"range {self.low!r} {self.high!r}"


@dataclass(frozen=True)
class LabelMatch(Predicate):
    label: int

    kind = "label-match"
    feature_kind = "labels"

    def evaluate(self, features, fq, n):
        bits = np.zeros(n, dtype=bool)
        bits[features.posting(self.label)] = True
        return bits

    def test(self, payload, fq):
        return self.label in payload

    def spec(self):
        return f"label {self.label}"


@dataclass(frozen=True)
class LabelSubset(Predicate):
    """Node's label set contains every label in ``labels``."""

    labels: FrozenSet[int]

    kind = "label-subset"
    feature_kind = "labels"

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(int(x) for x in self.labels))

    def evaluate(self, features, fq, n):
        bits = np.ones(n, dtype=bool)
        for label in self.labels:
            hit = np.zeros(n, dtype=bool)
            hit[features.posting(label)] = True
            bits &= hit
        return bits

    def test(self, payload, fq):
        return self.labels <= payload


class ExternalMask(Predicate):
    """A caller-supplied boolean vector over node ids."""

    kind = "external-mask"

    def __init__(self, bits):
        self.bits = np.asarray(bits, dtype=bool).reshape(-1)

    def evaluate(self, features, fq, n):
        if len(self.bits) != n:
            raise DimensionError(
                f"external mask has {len(self.bits)} bits for {n} nodes",
                details={"expected": n, "got": len(self.bits)},
            )
        return self.bits.copy()

    def test(self, payload, fq):
        raise PredicateTypeError("external-mask predicates are tested by node id, not payload")

    def test_node(self, features, i, fq):
        return bool(i < len(self.bits) and self.bits[i])


class CallbackPredicate(Predicate):
    """Wraps ``fn(payload, fq) -> bool`` for opaque byte features."""

    kind = "callback"

    def __init__(self, fn: Callable[[Any, Any], bool]):
        self.fn = fn

    def evaluate(self, features, fq, n):
        if features is None:
            raise PredicateTypeError("callback predicate needs a feature column")
        return np.fromiter((bool(self.fn(features.take(i), fq)) for i in range(n)),
                           dtype=bool, count=n)

    def test(self, payload, fq):
        return bool(self.fn(payload, fq))


@dataclass
class PredicateMask:
    bits: np.ndarray
    true_count: int

    @classmethod
    def from_bits(cls, bits) -> "PredicateMask":
        bits = np.ascontiguousarray(bits, dtype=bool)
        return cls(bits, int(np.count_nonzero(bits)))

    def __len__(self):
        return len(self.bits)

    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def restrict(self, live) -> "PredicateMask":
        """Mask ANDed with a liveness vector (tombstoned nodes cleared)."""
        if live is None:
            return self
        m = min(len(self.bits), len(live))
        return PredicateMask.from_bits(self.bits[:m] & np.asarray(live[:m], dtype=bool))


def evaluate_mask(dataset, query) -> PredicateMask:
    """Evaluate the query predicate once per dataset element."""
    predicate = query.predicate
    predicate.check_features(dataset.features)
    bits = predicate.evaluate(dataset.features, query.fq, dataset.n)
    return PredicateMask.from_bits(bits)


def selectivity(mask: PredicateMask, n: int) -> float:
    if n < 1:
        raise ParameterError("selectivity needs n >= 1")
    return mask.true_count / n


def parse_predicate(text: str) -> Predicate:
    """Parse ``true`` | ``range l r`` | ``label X``."""
    parts = text.split()
    if not parts:
        raise ParameterError("empty predicate spec")
    head = parts[0].lower()
    try:
        if head == "true" and len(parts) == 1:
            return AlwaysTrue()
        if head == "range" and len(parts) == 3:
            low, high = float(parts[1]), float(parts[2])
            if low > high:
                raise ParameterError(f"range bounds out of order: {low} > {high}")
            return ScalarRange(low, high)
        if head == "label" and len(parts) == 2:
            return LabelMatch(int(parts[1]))
    except ValueError as e:
        if isinstance(e, ParameterError):
            raise
        raise ParameterError(f"bad predicate spec {text!r}: {e}") from e
    raise ParameterError(f"bad predicate spec {text!r}; expected 'true', 'range l r' or 'label X'")
