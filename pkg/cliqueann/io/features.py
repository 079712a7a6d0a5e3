"""Feature columns stored as .npy files for the command line."""
import numpy as np

from cliqueann.core.dataset import LabelFeatures, ScalarFeatures
from cliqueann.exceptions import ParameterError


def load_features(path):
    """Float array -> scalar features; integer array -> one label per node."""
    values = np.load(path, allow_pickle=False)
    if values.ndim != 1:
        raise ParameterError(f"feature file must hold a 1-d array, got shape {values.shape}")
    if np.issubdtype(values.dtype, np.integer):
        return LabelFeatures.from_single(values)
    if np.issubdtype(values.dtype, np.floating):
        return ScalarFeatures(values)
    raise ParameterError(f"unsupported feature dtype {values.dtype}")


def save_features(path, features) -> None:
    if isinstance(features, ScalarFeatures):
        np.save(path, features.values)
    elif isinstance(features, LabelFeatures) and np.all(np.diff(features.offsets) == 1):
        np.save(path, features.labels)
    else:
        raise ParameterError(f"{type(features).__name__} cannot be stored as a .npy column")
