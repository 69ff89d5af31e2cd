"""Matrix-free conjugate gradient and the ADMM normal equations."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError, NumericalError
from .image import check_same_shape


@dataclass(frozen=True)
class CgConfig:
    rel_tolerance: float = 1e-6
    max_iterations: int = 200

    def __post_init__(self):
        if not 0 < self.rel_tolerance < 1:
            raise ConfigurationError(f"rel_tolerance must lie in (0, 1), got {self.rel_tolerance}")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be positive")


@dataclass(frozen=True)
class CgReport:
    iterations_used: int
    final_relative_residual: float
    converged: bool
    residual_history: tuple = ()


def solve_spd(apply_M, b, x0=None, cfg=CgConfig()):
    """Solve ``M x = b`` for symmetric positive definite ``M`` given as a callable.

    Starts from ``x0`` (warm start). Stops once ``||M x - b|| <= tol * ||b||``.
    Returns the last iterate and a :class:`CgReport`; running out of
    iterations is reported, not raised.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    check_same_shape(x, b)

    b_norm = math.sqrt(float(np.vdot(b, b)))
    if not math.isfinite(b_norm):
        raise NumericalError("non-finite right-hand side")
    if b_norm == 0.0:
        # the unique solution of an SPD system with zero rhs
        return np.zeros_like(b), CgReport(0, 0.0, True, (0.0,))

    r = b - apply_M(x)
    rr = float(np.vdot(r, r))
    if not math.isfinite(rr):
        raise NumericalError("non-finite initial residual")
    history = [math.sqrt(rr) / b_norm]
    target = cfg.rel_tolerance * b_norm
    p = r.copy()
    it = 0
    while math.sqrt(rr) > target and it < cfg.max_iterations:
        Mp = apply_M(p)
        pMp = float(np.vdot(p, Mp))
        if not math.isfinite(pMp):
            raise NumericalError("non-finite value in CG recursion")
        if pMp <= 0.0:
            # M is not positive definite along p; keep the best iterate so far
            break
        alpha = rr / pMp
        x += alpha * p
        r -= alpha * Mp
        rr_new = float(np.vdot(r, r))
        if not math.isfinite(rr_new):
            raise NumericalError("non-finite residual in CG recursion")
        p = r + (rr_new / rr) * p
        rr = rr_new
        it += 1
        history.append(math.sqrt(rr) / b_norm)
    rel = math.sqrt(rr) / b_norm
    return x, CgReport(it, rel, rel <= cfg.rel_tolerance, tuple(history))


def make_admm_normal_operator(A, Dh, Dv, beta_t, beta_s):
    """``u -> A^T A u + beta_t Dh^T Dh u + beta_s Dv^T Dv u``."""
    if not (beta_t > 0 and beta_s > 0):
        raise ConfigurationError(f"penalties must be positive, got {beta_t}, {beta_s}")
    if not (A.input_shape == Dh.input_shape == Dv.input_shape):
        raise DimensionError("A, Dh and Dv must share the HR grid")

    def apply_M(u):
        return (A.apply_adjoint(A.apply(u))
                + beta_t * Dh.apply_adjoint(Dh.apply(u))
                + beta_s * Dv.apply_adjoint(Dv.apply(u)))

    return apply_M


def make_admm_rhs(A, Dh, Dv, g, t, s, lambda_t, lambda_s, beta_t, beta_s):
    """``A^T g + beta_t Dh^T (t - lambda_t/beta_t) + beta_s Dv^T (s - lambda_s/beta_s)``."""
    if not (beta_t > 0 and beta_s > 0):
        raise ConfigurationError(f"penalties must be positive, got {beta_t}, {beta_s}")
    for plane in (t, s, lambda_t, lambda_s):
        if np.shape(plane) != A.input_shape:
            raise DimensionError(f"plane shape {np.shape(plane)} != HR shape {A.input_shape}")
    return (A.apply_adjoint(g)
            + beta_t * Dh.apply_adjoint(t - lambda_t / beta_t)
            + beta_s * Dv.apply_adjoint(s - lambda_s / beta_s))
