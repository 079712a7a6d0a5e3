from dataclasses import asdict, dataclass, field
from enum import IntEnum
from typing import Dict, List, Optional, Tuple

import numpy as np

from cliqueann.exceptions import IndexLoadError, NodeNotFoundError


class CliqueKind(IntEnum):
    MINED = 0
    PSEUDO = 1


@dataclass
class Clique:
    members: np.ndarray
    kind: CliqueKind = CliqueKind.MINED
    # true-distance edge threshold alpha * d_min it was mined under, nan when unknown
    threshold: float = float("nan")
    alpha: float = float("nan")

    def __post_init__(self):
        self.members = np.unique(np.asarray(self.members, dtype=np.int32))
        self.kind = CliqueKind(self.kind)

    def __len__(self):
        return len(self.members)

    def __contains__(self, node):
        i = np.searchsorted(self.members, node)
        return bool(i < len(self.members) and self.members[i] == node)


@dataclass
class BuildMeta:
    n: int = 0
    k_prime: int = 0
    tau: int = 0
    alpha_schedule: List[float] = field(default_factory=list)
    rounds: int = 0
    pseudo_count: int = 0
    supercenter_cap: int = 0
    supercenter_exclusions: int = 0
    # (alpha, uncovered fraction after the round at that alpha)
    trace: List[Tuple[float, float]] = field(default_factory=list)
    threads: int = 1
    elapsed_seconds: float = 0.0
    inserted: int = 0
    deleted: int = 0

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["trace"] = [list(p) for p in self.trace]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "BuildMeta":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        meta = cls(**known)
        meta.trace = [(float(a), float(u)) for a, u in meta.trace]
        return meta


class CliqueIndex:
    """A tau-maximal clique cover plus its node -> clique inverted index.

    Clique ids are dense. Deleting nodes can leave a clique empty; empty
    cliques stay in place as tombstones until the index is compacted.
    """

    def __init__(self, n: int, tau: int, k_prime: int, cliques: List[Clique],
                 build_meta: Optional[BuildMeta] = None, deleted=None):
        self.n = int(n)
        self.tau = int(tau)
        self.k_prime = int(k_prime)
        self.cliques: List[Clique] = list(cliques)
        self.build_meta = build_meta or BuildMeta(n=self.n, k_prime=self.k_prime, tau=self.tau)
        self.deleted = np.zeros(self.n, dtype=bool) if deleted is None else np.asarray(deleted, dtype=bool).copy()
        # audit records: clique id -> local candidate set it was mined from
        self.audit: Dict[int, np.ndarray] = {}
        self.node_to_cliques: List[List[int]] = [[] for _ in range(self.n)]
        for cid, clique in enumerate(self.cliques):
            for u in clique.members.tolist():
                self.node_to_cliques[u].append(cid)
        self._flat = None

    # ---- read side -------------------------------------------------------

    @property
    def clique_count(self) -> int:
        return len(self.cliques)

    @property
    def total_members(self) -> int:
        return int(sum(len(c) for c in self.cliques))

    @property
    def size_bound(self) -> int:
        """Upper bound on total members: n cliques of at most k' + 1 nodes."""
        return self.n * (max(self.k_prime, 1) + 1)

    @property
    def live(self) -> np.ndarray:
        return ~self.deleted

    @property
    def live_count(self) -> int:
        return int(self.n - np.count_nonzero(self.deleted))

    @property
    def pseudo_count(self) -> int:
        return sum(1 for c in self.cliques if c.kind == CliqueKind.PSEUDO and len(c) > 0)

    def is_live(self, u: int) -> bool:
        return 0 <= u < self.n and not self.deleted[u]

    def cliques_of(self, u: int) -> List[int]:
        return self.node_to_cliques[u]

    def flat(self):
        """CSR views (clique offsets, member pool, node offsets, clique-id pool).

        Cached until the next mutation; search reads only these arrays.
        """
        if self._flat is None:
            sizes = np.fromiter((len(c) for c in self.cliques), dtype=np.int64, count=len(self.cliques))
            clique_offsets = np.zeros(len(self.cliques) + 1, dtype=np.int64)
            np.cumsum(sizes, out=clique_offsets[1:])
            member_pool = (np.concatenate([c.members for c in self.cliques]).astype(np.int32)
                           if self.cliques else np.empty(0, dtype=np.int32))
            node_sizes = np.fromiter((len(l) for l in self.node_to_cliques), dtype=np.int64, count=self.n)
            node_offsets = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(node_sizes, out=node_offsets[1:])
            node_pool = np.fromiter((cid for l in self.node_to_cliques for cid in l),
                                    dtype=np.int32, count=int(node_offsets[-1]))
            self._flat = (clique_offsets, member_pool, node_offsets, node_pool)
        return self._flat

    def kinds(self) -> np.ndarray:
        return np.fromiter((int(c.kind) for c in self.cliques), dtype=np.uint8, count=len(self.cliques))

    # ---- write side (single writer) ------------------------------------

    def _touch(self):
        self._flat = None

    def grow(self, count: int = 1) -> None:
        """Reserve ``count`` new node ids at the end."""
        self.n += count
        self.node_to_cliques.extend([] for _ in range(count))
        self.deleted = np.concatenate([self.deleted, np.zeros(count, dtype=bool)])
        self._touch()

    def add_clique(self, clique: Clique, candidates=None) -> int:
        cid = len(self.cliques)
        self.cliques.append(clique)
        for u in clique.members.tolist():
            self.node_to_cliques[u].append(cid)
        if candidates is not None:
            self.audit[cid] = np.asarray(candidates, dtype=np.int32)
        self._touch()
        return cid

    def add_member(self, cid: int, u: int) -> None:
        clique = self.cliques[cid]
        if u in clique:
            return
        clique.members = np.insert(clique.members, np.searchsorted(clique.members, u), u).astype(np.int32)
        self.node_to_cliques[u].append(cid)
        self._touch()

    def remove_member(self, cid: int, u: int) -> None:
        clique = self.cliques[cid]
        clique.members = clique.members[clique.members != u]
        self.node_to_cliques[u].remove(cid)
        self._touch()

    def mark_deleted(self, u: int) -> None:
        if not self.is_live(u):
            raise NodeNotFoundError(f"node {u} does not exist or is already deleted", details={"node": int(u)})
        self.deleted[u] = True
        self._touch()

    def compacted(self) -> "CliqueIndex":
        """Copy without empty (dissolved) cliques; clique ids are renumbered."""
        kept = [i for i, c in enumerate(self.cliques) if len(c) > 0]
        remap = {old: new for new, old in enumerate(kept)}
        index = CliqueIndex(self.n, self.tau, self.k_prime,
                            [Clique(self.cliques[i].members.copy(), self.cliques[i].kind,
                                    self.cliques[i].threshold, self.cliques[i].alpha) for i in kept],
                            build_meta=BuildMeta.from_dict(self.build_meta.to_dict()),
                            deleted=self.deleted)
        index.audit = {remap[c]: v for c, v in self.audit.items() if c in remap}
        return index

    # ---- structural checks ---------------------------------------------

    def check(self) -> None:
        """Raise IndexLoadError naming the first failed structural check."""
        for cid, clique in enumerate(self.cliques):
            m = clique.members
            if len(m) and (m[0] < 0 or m[-1] >= self.n):
                raise IndexLoadError(f"clique {cid} has a member outside [0, {self.n})", "member-range")
            if np.any(np.diff(m) <= 0):
                raise IndexLoadError(f"clique {cid} members are not strictly ascending", "sorted-members")
            if len(m) and np.any(self.deleted[m]):
                raise IndexLoadError(f"clique {cid} contains a deleted node", "deleted-member")
        expected: List[List[int]] = [[] for _ in range(self.n)]
        for cid, clique in enumerate(self.cliques):
            for u in clique.members.tolist():
                expected[u].append(cid)
        for u in range(self.n):
            if sorted(self.node_to_cliques[u]) != expected[u]:
                raise IndexLoadError(f"node {u} clique list does not invert clique membership", "inverse-index")
        for u in range(self.n):
            if not self.deleted[u] and not self.node_to_cliques[u]:
                raise IndexLoadError(f"live node {u} is in no clique", "coverage")
        if self.total_members > self.size_bound:
            raise IndexLoadError(
                f"total members {self.total_members} exceed n*(k'+1) = {self.size_bound}", "size-bound")

    def __repr__(self):
        return (f"CliqueIndex(n={self.n}, tau={self.tau}, k_prime={self.k_prime}, "
                f"cliques={self.clique_count}, members={self.total_members})")
