"""Image containers and small array helpers.

Images are plain ``numpy.ndarray`` objects of dtype float64, either
``(height, width)`` for a single channel or ``(height, width, channels)``.
Pixel ``(r, c)`` of a plane lives at flat index ``r * width + c`` (C order).
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError


@dataclass(frozen=True)
class PixelIndex:
    row: int
    col: int

    def flat(self, width):
        return self.row * width + self.col


def as_image(data, copy=False):
    """Validate and convert ``data`` to a float64 image array."""
    arr = np.array(data, dtype=np.float64, copy=copy) if copy else np.asarray(data, dtype=np.float64)
    if arr.ndim not in (2, 3) or min(arr.shape) < 1:
        raise DimensionError(f"expected (H, W) or (H, W, C) image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError("image contains non-finite values")
    return arr


def new_constant(height, width, value, channels=1):
    if height < 1 or width < 1 or channels < 1:
        raise DimensionError(f"non-positive dimensions ({height}, {width}, {channels})")
    if not np.isfinite(value):
        raise NumericalError("constant value must be finite")
    shape = (height, width) if channels == 1 else (height, width, channels)
    return np.full(shape, float(value), dtype=np.float64)


def check_same_shape(a, b):
    if np.shape(a) != np.shape(b):
        raise DimensionError(f"shape mismatch: {np.shape(a)} vs {np.shape(b)}")


def inner_product(a, b):
    check_same_shape(a, b)
    return float(np.vdot(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)))


def clamp_to_unit(img):
    return np.clip(img, 0.0, 1.0)


def channels(img):
    return 1 if img.ndim == 2 else img.shape[2]


def iter_planes(img):
    """Yield the 2D planes of ``img`` (one for a single-channel image)."""
    if img.ndim == 2:
        yield img
    else:
        for c in range(img.shape[2]):
            yield img[:, :, c]


def stack_planes(planes):
    planes = list(planes)
    if len(planes) == 1:
        return planes[0]
    return np.stack(planes, axis=-1)
