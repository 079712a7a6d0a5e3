"""Query workloads with controlled selectivity and exact ground truth."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from cliqueann.baselines.prefilter import prefilter_bruteforce
from cliqueann.core.dataset import Features, LabelFeatures, Query, ScalarFeatures
from cliqueann.core.predicates import LabelMatch, PredicateMask, ScalarRange, evaluate_mask, selectivity
from cliqueann.exceptions import WorkloadError
from cliqueann.utils.logging import get_logger

logger = get_logger(__name__)

MIXED_ZIPF = "mixed-zipf-labels"
FIXED_RANGE = "fixed-range"
FIXED_LABEL = "fixed-label"

RANGE_PRESET_TARGETS = (0.3, 0.15, 0.07, 0.03, 0.015, 0.007, 0.003, 0.001)
RANGE_TOLERANCE = 0.10


@dataclass
class Workload:
    kind: str
    queries: List[Query]
    ground_truth: List[np.ndarray]
    selectivities: np.ndarray
    features: Features
    k: int = 10
    seed: Optional[int] = None
    params: Dict = field(default_factory=dict)
    # q x n predicate bits read back from a workload file
    stored_masks: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.queries)

    def bind(self, dataset):
        """The dataset carrying this workload's feature column."""
        if dataset.features is self.features:
            return dataset
        return dataset.with_features(self.features)

    def masks(self, dataset) -> List[PredicateMask]:
        bound = self.bind(dataset)
        if self.stored_masks is not None and self.stored_masks.shape[1] == bound.n:
            return [PredicateMask.from_bits(bits) for bits in self.stored_masks]
        return [evaluate_mask(bound, q) for q in self.queries]

    def subset(self, lo: float, hi: float) -> "Workload":
        """Queries whose selectivity lies in [lo, hi]."""
        keep = [i for i, s in enumerate(self.selectivities) if lo <= s <= hi]
        return Workload(self.kind, [self.queries[i] for i in keep], [self.ground_truth[i] for i in keep],
                        self.selectivities[keep], self.features, self.k, self.seed, dict(self.params),
                        None if self.stored_masks is None else self.stored_masks[keep])


def _rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def query_vectors(dataset, num_queries: int, rng, noise: float = 0.05) -> np.ndarray:
    """Random dataset rows perturbed by ``noise`` times the per-dimension spread."""
    rows = rng.integers(0, dataset.n, size=num_queries)
    scale = dataset.vectors.std(axis=0) * noise
    jitter = rng.standard_normal((num_queries, dataset.dim)) * scale
    return (dataset.vectors[rows] + jitter).astype(np.float32)


def attach_ground_truth(kind, dataset, features, predicates, vectors, k, seed, params) -> Workload:
    bound = dataset.with_features(features)
    queries, truth, sel = [], [], []
    for vq, predicate in zip(vectors, predicates):
        query = Query(vq, None, predicate)
        mask = evaluate_mask(bound, query)
        queries.append(query)
        sel.append(selectivity(mask, bound.n))
        truth.append(prefilter_bruteforce(bound, query, k, mask=mask).ids)
    logger.info("%s workload: %d queries, selectivity %.4g..%.4g", kind, len(queries),
                min(sel) if sel else 0.0, max(sel) if sel else 0.0)
    return Workload(kind, queries, truth, np.asarray(sel, dtype=np.float64), features, k, seed, params)


def gen_zipf_label_workload(dataset, num_labels: int = 12, zipf_s: float = 1.0, num_queries: int = 100,
                            rng=None, k: int = 10, seed: Optional[int] = None, noise: float = 0.05) -> Workload:
    """One Zipf-distributed label per point; each query matches a label drawn by the same law."""
    if num_labels < 1:
        raise WorkloadError(f"num_labels must be >= 1, got {num_labels}")
    rng = _rng(rng if rng is not None else seed)
    law = stats.zipfian(zipf_s, num_labels)
    labels = law.rvs(size=dataset.n, random_state=rng) - 1
    wanted = law.rvs(size=num_queries, random_state=rng) - 1
    vectors = query_vectors(dataset, num_queries, rng, noise)
    predicates = [LabelMatch(int(x)) for x in np.atleast_1d(wanted)]
    params = {"num_labels": num_labels, "zipf_s": zipf_s, "num_queries": num_queries, "noise": noise}
    return attach_ground_truth(MIXED_ZIPF, dataset, LabelFeatures.from_single(labels), predicates,
                               vectors, k, seed, params)


def range_interval(sorted_values: np.ndarray, target: float, rng):
    """Inclusive bounds covering round(target * n) consecutive sorted values."""
    n = len(sorted_values)
    if not 0 < target <= 1:
        raise WorkloadError(f"selectivity target {target} is outside (0, 1]")
    if target == 1:
        return 0.0, 1.0
    m = max(1, int(round(target * n)))
    if abs(m / n - target) > RANGE_TOLERANCE * target:
        raise WorkloadError(f"selectivity {target} is unreachable within 10% on {n} points")
    start = int(rng.integers(0, n - m + 1))
    return float(sorted_values[start]), float(sorted_values[start + m - 1])


def gen_range_workload(dataset, target_selectivities: Sequence[float] = RANGE_PRESET_TARGETS,
                       per_target: int = 10, rng=None, k: int = 10, seed: Optional[int] = None,
                       noise: float = 0.05) -> Workload:
    """Uniform [0, 1) scalar per point; range predicates hitting each target selectivity."""
    rng = _rng(rng if rng is not None else seed)
    values = rng.random(dataset.n)
    ordered = np.sort(values)
    predicates = []
    for target in target_selectivities:
        for _ in range(per_target):
            predicates.append(ScalarRange(*range_interval(ordered, float(target), rng)))
    vectors = query_vectors(dataset, len(predicates), rng, noise)
    params = {"targets": [float(t) for t in target_selectivities], "per_target": per_target, "noise": noise}
    return attach_ground_truth(FIXED_RANGE, dataset, ScalarFeatures(values), predicates, vectors, k, seed, params)


def gen_fixed_label_workload(dataset, target_selectivity: float, num_queries: int = 100, num_other_labels: int = 9,
                             rng=None, k: int = 10, seed: Optional[int] = None, noise: float = 0.05) -> Workload:
    """Label 0 on round(s * n) random points, other labels elsewhere; every query asks for label 0."""
    if not 0 < target_selectivity <= 1:
        raise WorkloadError(f"selectivity target {target_selectivity} is outside (0, 1]")
    rng = _rng(rng if rng is not None else seed)
    n = dataset.n
    m = max(1, int(round(target_selectivity * n)))
    labels = rng.integers(1, num_other_labels + 1, size=n)
    labels[rng.choice(n, size=m, replace=False)] = 0
    vectors = query_vectors(dataset, num_queries, rng, noise)
    predicates = [LabelMatch(0)] * num_queries
    params = {"target": float(target_selectivity), "num_queries": num_queries,
              "num_other_labels": num_other_labels, "noise": noise}
    return attach_ground_truth(FIXED_LABEL, dataset, LabelFeatures.from_single(labels), predicates,
                               vectors, k, seed, params)


def regenerate(workload: Workload, dataset) -> Workload:
    """Rebuild a workload from its recorded generator parameters and seed."""
    p = workload.params
    if workload.kind == MIXED_ZIPF:
        return gen_zipf_label_workload(dataset, p["num_labels"], p["zipf_s"], p["num_queries"],
                                       k=workload.k, seed=workload.seed, noise=p["noise"])
    if workload.kind == FIXED_RANGE:
        return gen_range_workload(dataset, p["targets"], p["per_target"], k=workload.k, seed=workload.seed,
                                  noise=p["noise"])
    if workload.kind == FIXED_LABEL:
        return gen_fixed_label_workload(dataset, p["target"], p["num_queries"], p["num_other_labels"],
                                        k=workload.k, seed=workload.seed, noise=p["noise"])
    raise WorkloadError(f"unknown workload kind {workload.kind!r}")
