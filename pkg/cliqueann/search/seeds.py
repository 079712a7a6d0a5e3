"""Random entry points for multi-seed search."""
import math
from typing import Callable

import numpy as np


def seed_count(epsilon: float, n: int) -> int:
    return int(math.ceil(epsilon * math.sqrt(n))) if epsilon > 0 and n > 0 else 0


def sample_seeds(mask, epsilon: float, n: int, rng) -> np.ndarray:
    """ceil(epsilon * sqrt(n)) distinct predicate-true ids drawn uniformly.

    Reservoir sampling by random keys: every true position gets a uniform key
    and the m smallest keys win. Returns every valid id when there are fewer
    than m. Output is ascending.
    """
    m = seed_count(epsilon, n)
    if m == 0:
        return np.empty(0, dtype=np.int64)
    valid = mask.ids() if hasattr(mask, "ids") else np.flatnonzero(mask)
    if len(valid) <= m:
        return valid.astype(np.int64)
    keys = rng.random(len(valid))
    chosen = np.argpartition(keys, m - 1)[:m]
    return np.sort(valid[chosen]).astype(np.int64)


def sample_seeds_lazy(is_valid: Callable[[int], bool], candidates, epsilon: float, n: int, rng) -> np.ndarray:
    """Draw candidates in random order, testing each, until m valid ids are found.

    For expensive predicates: the predicate runs only on the nodes drawn.
    """
    m = seed_count(epsilon, n)
    if m == 0:
        return np.empty(0, dtype=np.int64)
    found = []
    for u in rng.permutation(np.asarray(candidates)).tolist():
        if is_valid(u):
            found.append(u)
            if len(found) == m:
                break
    return np.sort(np.asarray(found, dtype=np.int64))
