"""Binary clique-index files.

Layout, little-endian:
    b"MCI1", u32 n, u32 k', u32 tau, u32 clique_count, u64 total_members
    u64 clique offsets (clique_count + 1), u32 member pool (total_members)
    clique kind bitset (1 = pseudo), ceil(clique_count / 8) bytes, LSB first
    u64 node offsets (n + 1), u32 clique-id pool (total_members)
then the trailer:
    u32 deleted count, u32 deleted ids
    f32 thresholds (clique_count), f32 alphas (clique_count)
    u32 meta length, UTF-8 JSON build metadata (sorted keys)

Indexes are compacted before writing, so dissolved cliques are dropped.
"""
import json
import struct

import numpy as np

from cliqueann.exceptions import IndexLoadError
from cliqueann.index.clique_index import BuildMeta, Clique, CliqueIndex, CliqueKind

MAGIC = b"MCI1"
HEADER = struct.Struct("<4sIIIIQ")


def index_to_bytes(index: CliqueIndex) -> bytes:
    index = index.compacted()
    clique_offsets, member_pool, node_offsets, node_pool = index.flat()
    count = index.clique_count
    deleted = np.flatnonzero(index.deleted).astype("<u4")
    meta = json.dumps(index.build_meta.to_dict(), sort_keys=True).encode("utf-8")
    parts = [
        HEADER.pack(MAGIC, index.n, index.k_prime, index.tau, count, int(clique_offsets[-1])),
        clique_offsets.astype("<u8").tobytes(),
        member_pool.astype("<u4").tobytes(),
        np.packbits(index.kinds().astype(bool), bitorder="little").tobytes(),
        node_offsets.astype("<u8").tobytes(),
        node_pool.astype("<u4").tobytes(),
        struct.pack("<I", len(deleted)),
        deleted.tobytes(),
        np.array([c.threshold for c in index.cliques], dtype="<f4").tobytes(),
        np.array([c.alpha for c in index.cliques], dtype="<f4").tobytes(),
        struct.pack("<I", len(meta)),
        meta,
    ]
    return b"".join(parts)


def save_index(path, index: CliqueIndex) -> None:
    with open(path, "wb") as fh:
        fh.write(index_to_bytes(index))


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        if self.pos + size > len(self.buf):
            raise IndexLoadError(f"file ends inside {what} at byte {self.pos}", "truncated")
        chunk = self.buf[self.pos:self.pos + size]
        self.pos += size
        return chunk

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        dt = np.dtype(dtype)
        return np.frombuffer(self.take(dt.itemsize * count, what), dtype=dt)


def _check_offsets(offsets: np.ndarray, total: int, what: str) -> None:
    if offsets[0] != 0 or offsets[-1] != total or np.any(np.diff(offsets.astype(np.int64)) < 0):
        raise IndexLoadError(f"{what} offsets are not a valid prefix sum of {total} entries", "offsets")


def index_from_bytes(buf: bytes) -> CliqueIndex:
    if buf[:4] != MAGIC:
        raise IndexLoadError(f"bad magic {bytes(buf[:4])!r}", "magic")
    reader = _Reader(buf)
    _, n, k_prime, tau, count, total = HEADER.unpack(reader.take(HEADER.size, "header"))
    clique_offsets = reader.array("<u8", count + 1, "clique offsets").astype(np.int64)
    _check_offsets(clique_offsets, total, "clique")
    pool = reader.array("<u4", total, "member pool").astype(np.int64)
    if total and pool.max() >= n:
        raise IndexLoadError(f"member id {int(pool.max())} is outside [0, {n})", "member-range")
    kind_bits = np.unpackbits(np.frombuffer(reader.take((count + 7) // 8, "kind bitset"), dtype=np.uint8),
                              count=count, bitorder="little")
    node_offsets = reader.array("<u8", n + 1, "node offsets").astype(np.int64)
    _check_offsets(node_offsets, total, "node")
    node_pool = reader.array("<u4", total, "clique-id pool").astype(np.int64)
    (n_deleted,) = struct.unpack("<I", reader.take(4, "deleted count"))
    deleted_ids = reader.array("<u4", n_deleted, "deleted ids").astype(np.int64)
    thresholds = reader.array("<f4", count, "thresholds")
    alphas = reader.array("<f4", count, "alphas")
    (meta_len,) = struct.unpack("<I", reader.take(4, "meta length"))
    try:
        meta = BuildMeta.from_dict(json.loads(reader.take(meta_len, "build metadata").decode("utf-8")))
    except (ValueError, TypeError) as e:
        raise IndexLoadError(f"build metadata is not valid JSON: {e}", "metadata") from e
    if reader.pos != len(buf):
        raise IndexLoadError(f"{len(buf) - reader.pos} trailing bytes", "trailing-bytes")

    members = [pool[clique_offsets[c]:clique_offsets[c + 1]] for c in range(count)]
    for c, m in enumerate(members):
        if np.any(np.diff(m) <= 0):
            raise IndexLoadError(f"clique {c} members are not strictly ascending", "sorted-members")
    if np.any(deleted_ids >= n):
        raise IndexLoadError("deleted id outside the node range", "member-range")
    deleted = np.zeros(n, dtype=bool)
    deleted[deleted_ids] = True
    cliques = [Clique(m, CliqueKind(int(kind_bits[c])), float(thresholds[c]), float(alphas[c]))
               for c, m in enumerate(members)]
    index = CliqueIndex(n, tau, k_prime, cliques, build_meta=meta, deleted=deleted)
    _, _, expected_offsets, expected_pool = index.flat()
    if not (np.array_equal(expected_offsets, node_offsets) and np.array_equal(expected_pool, node_pool)):
        raise IndexLoadError("stored node -> clique lists do not invert clique membership", "inverse-index")
    index.check()
    return index


def load_index(path) -> CliqueIndex:
    with open(path, "rb") as fh:
        return index_from_bytes(fh.read())
