"""Index statistics and an independent audit of built indexes."""
from typing import Dict, List, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist, pdist

from cliqueann.exceptions import IndexLoadError
from cliqueann.index.clique_index import BuildMeta, CliqueIndex, CliqueKind


def effective_out_degree(index: CliqueIndex) -> float:
    """Mean size of the union of a live node's clique co-members."""
    live = np.flatnonzero(index.live)
    if len(live) == 0:
        return 0.0
    total = 0
    for u in live.tolist():
        cids = index.node_to_cliques[u]
        if not cids:
            continue
        if len(cids) == 1:
            total += len(index.cliques[cids[0]]) - 1
        else:
            total += len(np.unique(np.concatenate([index.cliques[c].members for c in cids]))) - 1
    return total / len(live)


def coverage_curve(trace: Union[BuildMeta, CliqueIndex, List]) -> List[Tuple[float, float]]:
    """(alpha, uncovered fraction) after each build round."""
    if isinstance(trace, CliqueIndex):
        trace = trace.build_meta
    if isinstance(trace, BuildMeta):
        trace = trace.trace
    return [(float(a), float(u)) for a, u in trace]


def index_stats(index: CliqueIndex) -> Dict:
    sizes = np.array([len(c) for c in index.cliques if len(c) > 0], dtype=np.int64)
    live = max(index.live_count, 1)
    return {
        "n": index.n,
        "live": index.live_count,
        "k_prime": index.k_prime,
        "tau": index.tau,
        "clique_count": int(len(sizes)),
        "total_members": int(sizes.sum()) if len(sizes) else 0,
        "members_per_node": float(sizes.sum()) / live if len(sizes) else 0.0,
        "mean_clique_size": float(sizes.mean()) if len(sizes) else 0.0,
        "effective_out_degree": effective_out_degree(index),
        "pseudo_count": index.pseudo_count,
        "rounds": index.build_meta.rounds,
        "supercenter_exclusions": index.build_meta.supercenter_exclusions,
        "coverage_curve": coverage_curve(index),
    }


def audit_index(index: CliqueIndex, dataset, rtol: float = 1e-5) -> List[str]:
    """Re-verify an index against raw vectors; returns violation messages.

    Checks structure and coverage, pairwise distances of mined cliques
    against their recorded thresholds and, where the candidate set was
    recorded, maximality inside the local graph. Distances are recomputed in
    float64 and compared with a relative tolerance.
    """
    problems = []
    try:
        index.check()
    except IndexLoadError as e:
        problems.append(str(e))
    X = dataset.vectors.astype(np.float64)
    for cid, clique in enumerate(index.cliques):
        if clique.kind != CliqueKind.MINED or len(clique) < 2 or not np.isfinite(clique.threshold):
            continue
        t = clique.threshold
        d = pdist(X[clique.members])
        if np.any((d > t * (1 + rtol)) & (d > 0)):
            problems.append(f"clique {cid}: pair distance {d.max():.6g} exceeds threshold {t:.6g}")
        candidates = index.audit.get(cid)
        if candidates is None:
            continue
        outside = np.setdiff1d(candidates, clique.members)
        if len(outside) == 0:
            continue
        cross = cdist(X[outside], X[clique.members])
        adjacent_to_all = np.all((cross == 0) | (cross < t * (1 - rtol)), axis=1)
        for w in outside[adjacent_to_all].tolist():
            problems.append(f"clique {cid}: node {w} is adjacent to every member, clique not maximal")
    return problems
