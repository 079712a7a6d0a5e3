"""fvecs / ivecs / bvecs readers and writers.

Each record is a little-endian int32 dimension followed by that many
elements (float32, int32 or uint8).
"""
import os

import numpy as np

from cliqueann.core.dataset import Dataset
from cliqueann.exceptions import ParameterError, VecsParseError

VECS_DTYPES = {
    "f32": np.dtype("<f4"),
    "i32": np.dtype("<i4"),
    "u8": np.dtype("u1"),
}
EXTENSIONS = {".fvecs": "f32", ".ivecs": "i32", ".bvecs": "u8"}


def kind_for(path, kind=None) -> str:
    if kind is not None:
        if kind not in VECS_DTYPES:
            raise ParameterError(f"unknown vecs element kind {kind!r}")
        return kind
    ext = os.path.splitext(str(path))[1].lower()
    if ext not in EXTENSIONS:
        raise ParameterError(f"cannot infer vecs kind from extension {ext!r}")
    return EXTENSIONS[ext]


def parse_vecs(buf: bytes, kind: str) -> np.ndarray:
    dtype = VECS_DTYPES[kind]
    total = len(buf)
    if total == 0:
        return np.empty((0, 0), dtype=dtype)
    if total < 4:
        raise VecsParseError("truncated record header", offset=0)
    dim = int(np.frombuffer(buf, dtype="<i4", count=1)[0])
    if dim <= 0:
        raise VecsParseError(f"non-positive dimension {dim}", offset=0)
    record = 4 + dim * dtype.itemsize
    full = total // record
    raw = np.frombuffer(buf, dtype=np.uint8, count=full * record).reshape(full, record)
    dims = raw[:, :4].copy().view("<i4").ravel()
    bad = np.flatnonzero(dims != dim)
    if len(bad):
        r = int(bad[0])
        raise VecsParseError(f"record {r} has dimension {int(dims[r])}, expected {dim}", offset=r * record)
    if total != full * record:
        raise VecsParseError(f"truncated record {full}", offset=full * record)
    return raw[:, 4:].copy().view(dtype).reshape(full, dim)


def read_vecs(path, kind=None) -> np.ndarray:
    kind = kind_for(path, kind)
    with open(path, "rb") as fh:
        return parse_vecs(fh.read(), kind)


def load_vecs(path, kind=None) -> Dataset:
    """Dataset from a vecs file; integer kinds are widened to float32."""
    return Dataset(read_vecs(path, kind).astype(np.float32))


def save_vecs(path, array, kind=None) -> None:
    kind = kind_for(path, kind)
    dtype = VECS_DTYPES[kind]
    array = np.asarray(array)
    if array.ndim != 2:
        raise ParameterError(f"expected a 2-d array, got shape {array.shape}")
    n, dim = array.shape
    out = np.empty((n, 4 + dim * dtype.itemsize), dtype=np.uint8)
    out[:, :4] = np.full((n, 1), dim, dtype="<i4").view(np.uint8)
    out[:, 4:] = np.ascontiguousarray(array, dtype=dtype).view(np.uint8).reshape(n, -1)
    with open(path, "wb") as fh:
        fh.write(out.tobytes())
