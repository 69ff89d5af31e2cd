"""Forward-model simulation and synthetic test images."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError
from .image import iter_planes, stack_planes
from .operators import BlurSpec, DownsampleSpec, make_forward_model


@dataclass(frozen=True)
class DegradationSpec:
    blur: BlurSpec = field(default_factory=BlurSpec)
    down: DownsampleSpec = field(default_factory=DownsampleSpec)
    noise_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not self.noise_sigma >= 0:
            raise ConfigurationError("noise_sigma must be nonnegative")


def degrade(hr, spec):
    """``g = S H hr + noise`` with i.i.d. Gaussian noise from ``spec.seed``.

    Multi-channel inputs are degraded plane by plane from one generator.
    The result is not clamped.
    """
    hr = np.asarray(hr, dtype=np.float64)
    h, w = hr.shape[:2]
    L = spec.down.factor
    if h % L or w % L:
        raise DimensionError(f"HR shape {(h, w)} not divisible by factor {L}")
    A, _, _ = make_forward_model((h, w), spec.blur, spec.down)
    rng = np.random.default_rng(spec.seed)
    out = []
    for plane in iter_planes(hr):
        g = A.apply(plane)
        if spec.noise_sigma > 0:
            g = g + rng.normal(0.0, spec.noise_sigma, size=g.shape)
        out.append(g)
    return stack_planes(out)


@dataclass(frozen=True)
class SyntheticPattern:
    kind: str = "piecewise_constant_blocks"
    module_px: int = 5
    n_blocks: int = 6

    def __post_init__(self):
        if self.kind not in ("qr_like_grid", "piecewise_constant_blocks", "single_edge"):
            raise ConfigurationError(f"unknown pattern kind {self.kind!r}")


def _grid_factors(n):
    rows = int(np.floor(np.sqrt(n)))
    while n % rows:
        rows -= 1
    return rows, n // rows


def _finder(size):
    f = np.zeros((size, size))
    f[1:-1, 1:-1] = 1.0
    f[2:-2, 2:-2] = 0.0
    return f


def make_pattern(pattern, height, width, seed=0):
    """Deterministic synthetic HR image with values in ``[0, 1]``.

    * ``single_edge``: left half 0, right half 1.
    * ``qr_like_grid``: random binary modules of ``module_px`` pixels (dark = 0
      on light = 1) with three finder squares; leftover border pixels are light.
    * ``piecewise_constant_blocks``: ``n_blocks`` rectangles on a seeded
      irregular grid, each with its own distinct intensity.
    """
    if height < 1 or width < 1:
        raise DimensionError("pattern dimensions must be positive")
    rng = np.random.default_rng(seed)
    img = np.zeros((height, width))

    if pattern.kind == "single_edge":
        img[:, width // 2:] = 1.0
        return img

    if pattern.kind == "qr_like_grid":
        m = pattern.module_px
        if m < 1:
            raise ConfigurationError("module_px must be positive")
        nr, nc = height // m, width // m
        if nr < 1 or nc < 1:
            raise DimensionError("grid smaller than one module")
        modules = (rng.random((nr, nc)) < 0.5).astype(np.float64)
        if nr >= 9 and nc >= 9:
            fs = 7
            modules[:fs, :fs] = _finder(fs)
            modules[:fs, -fs:] = _finder(fs)
            modules[-fs:, :fs] = _finder(fs)
        img[:] = 1.0
        img[:nr * m, :nc * m] = np.kron(modules, np.ones((m, m)))
        return img

    n = pattern.n_blocks
    if n < 1:
        raise ConfigurationError("n_blocks must be positive")
    rows, cols = _grid_factors(n)
    if rows > height or cols > width:
        raise DimensionError("too many blocks for the grid")
    r_cuts = _random_cuts(rng, height, rows)
    c_cuts = _random_cuts(rng, width, cols)
    levels = rng.permutation(np.linspace(0.1, 0.9, n))
    for i in range(rows):
        for j in range(cols):
            img[r_cuts[i]:r_cuts[i + 1], c_cuts[j]:c_cuts[j + 1]] = levels[i * cols + j]
    return img


def _random_cuts(rng, n, parts):
    base = np.linspace(0, n, parts + 1)
    # jitter below half a spacing keeps the cuts strictly increasing
    jitter = rng.uniform(-0.25, 0.25, size=parts - 1) * (n / parts)
    cuts = np.round(base[1:-1] + jitter).astype(int)
    if np.any(np.diff(np.concatenate([[0], cuts, [n]])) < 1):
        cuts = np.round(base[1:-1]).astype(int)
    return [0, *cuts.tolist(), n]
