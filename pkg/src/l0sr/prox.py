"""Closed-form proximal maps used by the ADMM substeps.

All maps act elementwise (or pixel-pair-wise) and never couple pixels.
Scalar versions are reference implementations; the plane versions are the
vectorized equivalents used by the solvers.
"""
import math

import numpy as np

from .errors import ConfigurationError, DimensionError
from .image import check_same_shape


def _check_delta(delta):
    if not delta >= 0:
        raise ConfigurationError(f"threshold must be nonnegative, got {delta}")


def hard_threshold_1d(f, delta):
    """argmin_t  delta*|t|_0 + (t - f)^2.

    Keeps ``f`` when ``f**2 > delta``; ties go to 0.
    """
    _check_delta(delta)
    return f if f * f > delta else 0.0


def hard_threshold_2d(f, delta):
    """argmin_z  delta*[z != 0] + ||z - f||^2 over pairs ``z``."""
    _check_delta(delta)
    f1, f2 = f
    if f1 * f1 + f2 * f2 > delta:
        return (f1, f2)
    return (0.0, 0.0)


def group_soft_threshold(f, delta):
    """argmin_z  delta*||z|| + ||z - f||^2, i.e. shrink ``f`` by ``delta / 2``."""
    _check_delta(delta)
    f1, f2 = f
    norm = math.hypot(f1, f2)
    if norm == 0.0:
        return (0.0, 0.0)
    scale = max(1.0 - delta / (2.0 * norm), 0.0)
    return (scale * f1, scale * f2)


def hard_threshold_plane(f, delta):
    _check_delta(delta)
    f = np.asarray(f, dtype=np.float64)
    return np.where(f * f > delta, f, 0.0)


def hard_threshold_pair(fh, fv, delta):
    _check_delta(delta)
    check_same_shape(fh, fv)
    keep = fh * fh + fv * fv > delta
    return np.where(keep, fh, 0.0), np.where(keep, fv, 0.0)


def group_soft_threshold_pair(fh, fv, delta):
    _check_delta(delta)
    check_same_shape(fh, fv)
    norm = np.hypot(fh, fv)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norm > 0, np.maximum(1.0 - delta / (2.0 * norm), 0.0), 0.0)
    return scale * fh, scale * fv


def apply_prox_plane(plane, delta, kind):
    """Apply a proximal map over a whole plane.

    ``plane`` is one array for ``kind="l0_1d"`` and a pair ``(fh, fv)`` of
    aligned arrays for ``"l0_2d"`` and ``"l1_group"``.
    """
    if kind == "l0_1d":
        return hard_threshold_plane(plane, delta)
    if kind not in ("l0_2d", "l1_group"):
        raise ConfigurationError(f"unknown prox kind {kind!r}")
    if isinstance(plane, np.ndarray) and (plane.ndim != 3 or plane.shape[0] != 2):
        raise DimensionError(f"{kind} expects a pair of planes")
    try:
        fh, fv = plane
    except (TypeError, ValueError):
        raise DimensionError(f"{kind} expects a pair of planes") from None
    fh = np.asarray(fh, dtype=np.float64)
    fv = np.asarray(fv, dtype=np.float64)
    if kind == "l0_2d":
        return hard_threshold_pair(fh, fv, delta)
    return group_soft_threshold_pair(fh, fv, delta)
