from typing import Sequence

import numpy as np


def recall_at_k(result, truth, k: int) -> float:
    """|result@k & truth@k| / min(k, |truth|).

    A query with fewer than k valid nodes is fully recalled when every valid
    node is returned; with no valid nodes at all the recall is 1.
    """
    truth = list(truth)[:k]
    if not truth:
        return 1.0
    result = list(result)[:k]
    hits = len(set(int(x) for x in result) & set(int(x) for x in truth))
    return hits / max(1, min(k, len(truth)))


def mean_recall(results: Sequence, truths: Sequence, k: int) -> float:
    if len(results) != len(truths):
        raise ValueError(f"{len(results)} results for {len(truths)} ground-truth lists")
    if not results:
        return 0.0
    ids = [r.ids if hasattr(r, "ids") else r for r in results]
    return float(np.mean([recall_at_k(r, t, k) for r, t in zip(ids, truths)]))
