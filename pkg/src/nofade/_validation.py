"""Input validation helpers shared by the functional API and the estimators."""

import math
from pathlib import Path

import numpy as np

from .exceptions import ShapeError, ValidationError
from .imaging import GreyImage, load_grey, to_greyscale

NORMALIZATION_TOL = 1e-12


def check_distribution(p, name="P"):
    """Return ``p`` as a 1-D float array that sums to one."""
    if hasattr(p, "normalized"):
        p = p.normalized()
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"{name} must be a non-empty 1-D distribution, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(f"{name} must contain finite non-negative probabilities")
    total = math.fsum(arr)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"{name} sums to {total!r}, expected 1")
    return arr


def check_same_support(p, q):
    if p.shape != q.shape:
        raise ShapeError(f"bin structures differ: {p.shape} vs {q.shape}")


def check_non_negative(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def as_grey_image(item):
    """Coerce a path, raster or GreyImage into a GreyImage."""
    if isinstance(item, GreyImage):
        return item
    if isinstance(item, (str, Path)):
        return load_grey(item)
    return to_greyscale(np.asarray(item))


def check_image_batch(X):
    """Validate an image collection.

    Returns a ``(n, H, W)`` uint8 array when ``X`` is a homogeneous numeric
    batch (greyscale already applied), otherwise a list of GreyImage.
    """
    if isinstance(X, np.ndarray):
        if X.ndim == 4 and X.shape[-1] == 3:
            if X.size and (X.min() < 0 or X.max() > 255):
                raise ValidationError("channel values must lie in [0, 255]")
            return np.stack([to_greyscale(x).pixels for x in X]) if len(X) else X[..., 0].astype(np.uint8)
        if X.ndim == 3:
            if X.dtype != np.uint8:
                if X.size and (X.min() < 0 or X.max() > 255):
                    raise ValidationError("intensities must lie in [0, 255]")
                X = X.astype(np.uint8)
            return X
        if X.dtype != object:
            raise ShapeError(f"expected (n, H, W) or (n, H, W, 3) images, got shape {X.shape}")
    return [as_grey_image(x) for x in X]
