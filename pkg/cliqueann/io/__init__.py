from .features import load_features, save_features
from .index_file import index_from_bytes, index_to_bytes, load_index, save_index
from .vecs import load_vecs, read_vecs, save_vecs
from .workload_file import load_workload, save_workload

__all__ = [
    "load_vecs",
    "read_vecs",
    "save_vecs",
    "load_index",
    "save_index",
    "index_to_bytes",
    "index_from_bytes",
    "load_workload",
    "save_workload",
    "load_features",
    "save_features",
]
