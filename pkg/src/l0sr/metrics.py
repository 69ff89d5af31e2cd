"""Image quality metrics and segmentation helpers.

Multi-channel inputs are scored per channel and averaged.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError, DimensionError
from .image import check_same_shape, iter_planes

PSNR_CAP = 99.0


def psnr(x, ref):
    """PSNR in dB for unit peak; identical images give ``PSNR_CAP``."""
    check_same_shape(x, ref)
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    vals = []
    for a, b in zip(iter_planes(x), iter_planes(ref)):
        mse = float(np.mean((a - b) ** 2))
        vals.append(PSNR_CAP if mse == 0.0 else min(PSNR_CAP, 10.0 * np.log10(1.0 / mse)))
    return float(np.mean(vals))


@dataclass(frozen=True)
class SsimConfig:
    window_size: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def window(self):
        r = self.window_size // 2
        x = np.arange(-r, r + 1, dtype=np.float64)
        g = np.exp(-0.5 * (x / self.sigma) ** 2)
        w = np.outer(g, g)
        return w / w.sum()


def ssim_map(x, ref, cfg=SsimConfig()):
    """Local SSIM over all window positions fully inside the image."""
    win = cfg.window()
    r = cfg.window_size // 2
    if min(x.shape) < cfg.window_size:
        raise ConfigurationError(f"image {x.shape} smaller than SSIM window {cfg.window_size}")
    c1 = (cfg.k1 * cfg.dynamic_range) ** 2
    c2 = (cfg.k2 * cfg.dynamic_range) ** 2

    def filt(a):
        return ndimage.correlate(a, win, mode="reflect")[r:-r, r:-r]

    mx, my = filt(x), filt(ref)
    sxx = filt(x * x) - mx * mx
    syy = filt(ref * ref) - my * my
    sxy = filt(x * ref) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return num / den


def ssim(x, ref, cfg=SsimConfig()):
    check_same_shape(x, ref)
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    vals = []
    for a, b in zip(iter_planes(x), iter_planes(ref)):
        if np.array_equal(a, b):
            vals.append(1.0)
        else:
            vals.append(float(ssim_map(a, b, cfg).mean()))
    return float(np.mean(vals))


def jaccard(a, b):
    """Intersection over union of two boolean masks; two empty masks give 1."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise DimensionError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def _histogram_bins(x):
    return np.floor(np.clip(x, 0.0, 1.0) * 255.0 + 0.5).astype(np.int64)


def otsu_threshold_bin(hist):
    """Bin index ``t`` maximizing the between-class variance of ``{<= t}`` vs ``{> t}``.

    Returns ``None`` when fewer than two bins are occupied. Ties go to the
    smallest ``t``.
    """
    hist = np.asarray(hist, dtype=np.float64)
    total = hist.sum()
    if np.count_nonzero(hist) < 2:
        return None
    levels = np.arange(hist.size, dtype=np.float64)
    w0 = np.cumsum(hist)[:-1]
    w1 = total - w0
    s0 = np.cumsum(hist * levels)[:-1]
    s1 = (hist * levels).sum() - s0
    with np.errstate(divide="ignore", invalid="ignore"):
        between = w0 * w1 * (s0 / w0 - s1 / w1) ** 2
    between = np.where((w0 > 0) & (w1 > 0), between, -1.0)
    return int(np.argmax(between))


def otsu_binarize(x):
    """Otsu binarization on a 256-bin histogram of ``[0, 1]``.

    Pixels are binned at ``round(255 * clip(x))``. The returned threshold is
    the midpoint ``(t + 0.5) / 255`` between the last background bin and the
    first foreground bin; the mask marks pixels in bins above ``t``. A
    single-occupied-bin image returns its minimum (the value itself
    when constant) and an empty mask.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError("otsu_binarize expects a single-channel image")
    bins = _histogram_bins(x)
    hist = np.bincount(bins.ravel(), minlength=256)
    t = otsu_threshold_bin(hist)
    if t is None:
        return np.zeros(x.shape, dtype=bool), float(x.min())
    return bins > t, (t + 0.5) / 255.0


@dataclass
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia_history: List[float] = field(default_factory=list)
    iterations: int = 0


def _features(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        return x.reshape(-1, 1), x.shape
    return x.reshape(-1, x.shape[2]), x.shape[:2]


def _kmeans_pp(X, k, rng):
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total == 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return np.array(centers)


def _assign(X, centers):
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, float(d2[np.arange(X.shape[0]), labels].sum())


def kmeans(x, k, seed=0, max_iter=100):
    """Lloyd's k-means on per-pixel channel vectors with k-means++ seeding."""
    X, shape = _features(x)
    if k < 1:
        raise ConfigurationError("k must be positive")
    n_distinct = np.unique(X, axis=0).shape[0]
    if k > n_distinct:
        raise ConfigurationError(f"k={k} exceeds the {n_distinct} distinct feature vectors")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(X, k, rng)
    labels, inertia = _assign(X, centers)
    history = [inertia]
    it = 0
    for it in range(1, max_iter + 1):
        new_centers = centers.copy()
        for j in range(k):
            members = X[labels == j]
            if len(members):
                new_centers[j] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the worst-fit point
                d2 = ((X - centers[labels]) ** 2).sum(axis=1)
                new_centers[j] = X[np.argmax(d2)]
        centers = new_centers
        new_labels, inertia = _assign(X, centers)
        history.append(inertia)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return KMeansResult(labels.reshape(shape), centers, history, it)


def kmeans_labels(x, k, seed=0, max_iter=100):
    return kmeans(x, k, seed, max_iter).labels
