"""Input validation helpers shared by the estimators."""
import numpy as np
from sklearn.utils import check_array


def check_grid(X, name="X", allow_empty=False):
    """Coerce ``X`` to a finite 1-D float grid.

    Accepts scalars, 1-D arrays and single-column 2-D arrays, the latter being
    what a scikit-learn pipeline hands to ``transform``.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.size == 0:
        if allow_empty:
            return arr.reshape(0)
        raise ValueError(f"{name} is empty")
    arr = check_array(arr, ensure_2d=False, dtype=float, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    return arr


def check_choice(value, choices, name):
    if value not in choices:
        raise ValueError(f"{name} must be one of {tuple(choices)}, got {value!r}")
    return value


def check_positive(value, name, strict=True):
    value = float(value)
    if not np.isfinite(value) or (value <= 0 if strict else value < 0):
        bound = "> 0" if strict else ">= 0"
        raise ValueError(f"{name} must be finite and {bound}, got {value!r}")
    return value
