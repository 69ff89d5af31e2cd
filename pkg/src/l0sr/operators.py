"""Linear operators of the degradation model and the discrete gradient.

Every operator is a :class:`LinearOperator` carrying a forward map and its
exact adjoint. All operators act on single 2D planes; multi-channel images are
handled plane by plane by the callers.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .errors import ConfigurationError, DimensionError

Shape = Tuple[int, int]


class BoundaryCondition(str, enum.Enum):
    DIRICHLET_ZERO = "dirichlet_zero"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class LinearOperator:
    input_shape: Shape
    output_shape: Shape
    forward: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    adjoint: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    name: str = "op"

    def apply(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.input_shape:
            raise DimensionError(f"{self.name}: expected input {self.input_shape}, got {x.shape}")
        return self.forward(x)

    def apply_adjoint(self, y):
        y = np.asarray(y, dtype=np.float64)
        if y.shape != self.output_shape:
            raise DimensionError(f"{self.name}^T: expected input {self.output_shape}, got {y.shape}")
        return self.adjoint(y)

    __call__ = apply

    @property
    def T(self):
        return LinearOperator(self.output_shape, self.input_shape, self.adjoint, self.forward,
                              name=f"{self.name}^T")

    def to_dense(self):
        """Assemble the operator as a dense matrix (column ``j`` = image of basis vector ``j``).

        Only meant for small grids in tests.
        """
        n_in = int(np.prod(self.input_shape))
        cols = []
        for j in range(n_in):
            e = np.zeros(n_in)
            e[j] = 1.0
            cols.append(self.apply(e.reshape(self.input_shape)).ravel())
        return np.stack(cols, axis=1)


def _check_shape(shape):
    h, w = (int(s) for s in shape)
    if h < 1 or w < 1:
        raise DimensionError(f"invalid grid shape {shape}")
    return h, w


def identity(shape):
    shape = _check_shape(shape)
    return LinearOperator(shape, shape, lambda x: x.copy(), lambda y: y.copy(), name="I")


# -- finite differences ------------------------------------------------------

def _diff_forward(u, axis, periodic):
    if periodic:
        return np.roll(u, -1, axis=axis) - u
    out = -u
    if axis == 1:
        out[:, :-1] += u[:, 1:]
    else:
        out[:-1, :] += u[1:, :]
    return out


def _diff_adjoint(y, axis, periodic):
    if periodic:
        return np.roll(y, 1, axis=axis) - y
    out = -y
    if axis == 1:
        out[:, 1:] += y[:, :-1]
    else:
        out[1:, :] += y[:-1, :]
    return out


def _make_gradient(shape, boundary, axis, name):
    shape = _check_shape(shape)
    periodic = BoundaryCondition(boundary) is BoundaryCondition.PERIODIC
    return LinearOperator(
        shape, shape,
        lambda u: _diff_forward(u, axis, periodic),
        lambda y: _diff_adjoint(y, axis, periodic),
        name=name,
    )


def make_gradient_h(shape, boundary=BoundaryCondition.DIRICHLET_ZERO):
    """Forward differences along columns: ``u[r, c+1] - u[r, c]``.

    Under ``dirichlet_zero`` the last column sees a zero outside the grid,
    giving ``-u[r, W-1]``; under ``periodic`` it wraps to column 0.
    """
    return _make_gradient(shape, boundary, axis=1, name="Dh")


def make_gradient_v(shape, boundary=BoundaryCondition.DIRICHLET_ZERO):
    """Forward differences along rows; mirror image of :func:`make_gradient_h`."""
    return _make_gradient(shape, boundary, axis=0, name="Dv")


# -- blur --------------------------------------------------------------------

@dataclass(frozen=True)
class BlurSpec:
    sigma: float = 1.0
    radius: Optional[int] = None
    boundary: BoundaryCondition = BoundaryCondition.PERIODIC

    def resolved_radius(self):
        return int(self.radius) if self.radius is not None else int(math.ceil(3.0 * self.sigma))


def gaussian_kernel(sigma, radius):
    if sigma <= 0:
        raise ConfigurationError(f"blur sigma must be positive, got {sigma}")
    if radius < 1:
        raise ConfigurationError(f"blur radius must be positive, got {radius}")
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-0.5 * (x / sigma) ** 2)
    k = np.outer(g, g)
    return k / k.sum()


def make_blur(shape, spec):
    shape = _check_shape(shape)
    radius = spec.resolved_radius()
    if radius >= min(shape):
        raise ConfigurationError(f"blur radius {radius} does not fit grid {shape}")
    kernel = gaussian_kernel(spec.sigma, radius)
    if BoundaryCondition(spec.boundary) is BoundaryCondition.PERIODIC:
        mode = "wrap"
    else:
        mode = "constant"

    def forward(u):
        return ndimage.convolve(u, kernel, mode=mode, cval=0.0)

    def adjoint(y):
        return ndimage.correlate(y, kernel, mode=mode, cval=0.0)

    return LinearOperator(shape, shape, forward, adjoint, name="H")


# -- downsampling ------------------------------------------------------------

_KERNELS = ("lanczos3", "lanczos2", "box")


@dataclass(frozen=True)
class DownsampleSpec:
    factor: int = 2
    kernel: str = "lanczos3"


def _lanczos(x, a):
    out = np.sinc(x) * np.sinc(x / a)
    out[np.abs(x) >= a] = 0.0
    return out


def downsample_table(n, factor, kernel="lanczos3"):
    """Sparse ``(n // factor, n)`` weight table of the 1D antialiased resampler.

    Output sample ``i`` sits at input coordinate ``(i + 0.5) * factor - 0.5``.
    The kernel support is stretched by ``factor``; taps falling outside the
    signal are clamped onto the border sample. Rows are normalized to sum 1.
    """
    if kernel not in _KERNELS:
        raise ConfigurationError(f"unknown downsampling kernel {kernel!r}")
    if factor < 1:
        raise ConfigurationError(f"downsampling factor must be >= 1, got {factor}")
    if n % factor:
        raise DimensionError(f"length {n} not divisible by factor {factor}")
    m = n // factor
    if factor == 1:
        return sp.identity(n, format="csr", dtype=np.float64)

    rows, cols, vals = [], [], []
    for i in range(m):
        if kernel == "box":
            idx = np.arange(i * factor, (i + 1) * factor)
            w = np.ones(factor)
        else:
            a = 3 if kernel == "lanczos3" else 2
            center = (i + 0.5) * factor - 0.5
            support = a * factor
            idx = np.arange(math.floor(center - support), math.ceil(center + support) + 1)
            w = _lanczos((idx - center) / factor, a)
            idx = np.clip(idx, 0, n - 1)
        rows.append(np.full(idx.size, i))
        cols.append(idx)
        vals.append(w / w.sum())
    table = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, n)
    )
    # duplicates from border clamping are summed here
    return table.tocsr()


def make_downsample(hr_shape, spec):
    h, w = _check_shape(hr_shape)
    L = int(spec.factor)
    if L < 1:
        raise ConfigurationError(f"downsampling factor must be >= 1, got {L}")
    if h % L or w % L:
        raise DimensionError(f"HR shape {hr_shape} not divisible by factor {L}")
    if L == 1:
        return LinearOperator((h, w), (h, w), lambda x: x.copy(), lambda y: y.copy(), name="S")
    R = downsample_table(h, L, spec.kernel)
    C = downsample_table(w, L, spec.kernel)
    RT, CT = R.T.tocsr(), C.T.tocsr()

    def forward(u):
        return np.asarray(R @ (C @ u.T).T)

    def adjoint(y):
        return np.asarray(RT @ (CT @ y.T).T)

    return LinearOperator((h, w), (h // L, w // L), forward, adjoint, name="S")


def compose_forward(S, H):
    """``A = S H`` with adjoint ``H^T S^T``."""
    if H.output_shape != S.input_shape:
        raise DimensionError(f"cannot compose: H outputs {H.output_shape}, S expects {S.input_shape}")
    return LinearOperator(
        H.input_shape, S.output_shape,
        lambda u: S.apply(H.apply(u)),
        lambda y: H.apply_adjoint(S.apply_adjoint(y)),
        name="SH",
    )


def make_forward_model(hr_shape, blur, down):
    """Build ``(A, H, S)`` for the given HR shape."""
    H = make_blur(hr_shape, blur)
    S = make_downsample(hr_shape, down)
    return compose_forward(S, H), H, S
