"""Self-describing workload files.

Layout: b"MCWL", u32 header length, UTF-8 JSON header, then the binary body
    f32 query vectors (q x dim)
    feature column: f64 values (scalar) or u64 offsets + i64 labels (labels)
    f64 selectivities (q)
    packed predicate masks, q rows of ceil(n / 8) bytes, LSB first
    i32 ground truth (q x k), padded with -1
The header records the generator kind, parameters and RNG seed, so the
workload can be regenerated and compared.
"""
import json
import struct

import numpy as np

from cliqueann.core.dataset import LabelFeatures, Query, ScalarFeatures
from cliqueann.core.predicates import parse_predicate
from cliqueann.evaluation.workloads import Workload
from cliqueann.exceptions import WorkloadError

MAGIC = b"MCWL"


def save_workload(path, workload: Workload, dataset) -> None:
    bound = workload.bind(dataset)
    masks = workload.masks(bound)
    q = len(workload)
    features = workload.features
    specs = [query.predicate.spec() for query in workload.queries]
    if any(s is None for s in specs):
        raise WorkloadError("workload predicates must be expressible as 'true', 'range l r' or 'label X'")
    header = {
        "kind": workload.kind,
        "seed": workload.seed,
        "k": workload.k,
        "params": workload.params,
        "num_queries": q,
        "n": bound.n,
        "dim": bound.dim,
        "feature_kind": features.kind,
        "predicates": specs,
    }
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    truth = np.full((q, workload.k), -1, dtype="<i4")
    for i, ids in enumerate(workload.ground_truth):
        truth[i, :len(ids)] = ids[:workload.k]
    body = [np.array([query.vq for query in workload.queries], dtype="<f4").reshape(q, bound.dim).tobytes()]
    if isinstance(features, ScalarFeatures):
        body.append(features.values.astype("<f8").tobytes())
    elif isinstance(features, LabelFeatures):
        body.append(features.offsets.astype("<u8").tobytes())
        body.append(features.labels.astype("<i8").tobytes())
    else:
        raise WorkloadError(f"cannot store {features.kind} features in a workload file")
    body.append(np.asarray(workload.selectivities, dtype="<f8").tobytes())
    for mask in masks:
        body.append(np.packbits(mask.bits, bitorder="little").tobytes())
    body.append(truth.tobytes())
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<I", len(head)) + head + b"".join(body))


def load_workload(path) -> Workload:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != MAGIC:
        raise WorkloadError(f"bad workload magic {buf[:4]!r}")
    pos = 8
    try:
        (head_len,) = struct.unpack("<I", buf[4:8])
        header = json.loads(buf[pos:pos + head_len].decode("utf-8"))
    except (struct.error, ValueError) as e:
        raise WorkloadError(f"unreadable workload header: {e}") from e
    pos += head_len

    def take(dtype, count):
        nonlocal pos
        dt = np.dtype(dtype)
        size = dt.itemsize * count
        if pos + size > len(buf):
            raise WorkloadError(f"workload file truncated at byte {pos}")
        out = np.frombuffer(buf, dtype=dt, count=count, offset=pos)
        pos += size
        return out

    q, n, dim, k = header["num_queries"], header["n"], header["dim"], header["k"]
    vectors = take("<f4", q * dim).reshape(q, dim)
    if header["feature_kind"] == "scalar":
        features = ScalarFeatures(take("<f8", n))
    elif header["feature_kind"] == "labels":
        offsets = take("<u8", n + 1).astype(np.int64)
        features = LabelFeatures(offsets, take("<i8", int(offsets[-1])))
    else:
        raise WorkloadError(f"unknown feature kind {header['feature_kind']!r}")
    selectivities = take("<f8", q).astype(np.float64)
    row_bytes = (n + 7) // 8
    packed = take("u1", q * row_bytes).reshape(q, row_bytes)
    truth = take("<i4", q * k).reshape(q, k)
    if pos != len(buf):
        raise WorkloadError(f"{len(buf) - pos} trailing bytes in workload file")

    queries = [Query(vectors[i].copy(), None, parse_predicate(spec)) for i, spec in enumerate(header["predicates"])]
    masks = np.unpackbits(packed, axis=1, count=n, bitorder="little").astype(bool)
    return Workload(header["kind"], queries, [row[row >= 0].astype(np.int64) for row in truth],
                    selectivities, features, k, header["seed"], header["params"], masks)
