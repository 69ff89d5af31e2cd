"""ADMM solvers for l0-gradient regularized super-resolution.

Three variants share one loop:

* ``aniso_l0`` -- horizontal and vertical jumps counted separately; the
  splitting variables ``t ~ Dh u`` and ``s ~ Dv u`` are updated by scalar
  hard thresholding.
* ``iso_l0`` -- jumps counted per pixel on the gradient pair; ``z = (t, s)``
  is updated by 2D hard thresholding.
* ``iso_tv_baseline`` -- convex isotropic TV in the same frame, using group
  soft thresholding.

The ``u`` step solves ``(A^T A + beta_t Dh^T Dh + beta_s Dv^T Dv) u = rhs`` by
conjugate gradient, warm-started at the previous iterate.
"""
import hashlib
import math
import time
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .cg import CgConfig, make_admm_normal_operator, make_admm_rhs, solve_spd
from .errors import ConfigurationError, DimensionError, NumericalError
from .operators import BoundaryCondition
from .prox import group_soft_threshold_pair, hard_threshold_pair, hard_threshold_plane
from .trace import ConvergenceTrace, TraceRecord

VARIANTS = ("aniso_l0", "iso_l0", "iso_tv_baseline")
# Gradient entries at or below half an 8-bit quantization step count as zero.
# The ADMM iterate only satisfies u's gradient = t up to the splitting
# residual, so a roundoff-level tolerance would count every pixel.
ZERO_TOL = 1.0 / 510.0


# -- penalty schedules -------------------------------------------------------

@dataclass(frozen=True)
class PenaltySchedule:
    """Penalty sequence ``beta^k`` for ``k = 1, 2, ...``.

    ``constant``: ``beta0``; ``power``: ``beta0 * k**exponent``;
    ``super_linear``: ``beta0 * k * (1 + epsilon)**k``.
    """

    kind: str = "super_linear"
    beta0: float = 1.0
    exponent: float = 0.5
    epsilon: float = 1e-4

    def __post_init__(self):
        if self.kind not in ("constant", "power", "super_linear"):
            raise ConfigurationError(f"unknown schedule kind {self.kind!r}")
        if not self.beta0 > 0:
            raise ConfigurationError("beta0 must be positive")
        if self.kind == "super_linear" and self.epsilon < 0:
            raise ConfigurationError("epsilon must be nonnegative")

    def value(self, k):
        if k < 1:
            raise ValueError("schedule index starts at 1")
        if self.kind == "constant":
            return self.beta0
        if self.kind == "power":
            return self.beta0 * k ** self.exponent
        return self.beta0 * k * (1.0 + self.epsilon) ** k

    @property
    def satisfies_growth_condition(self):
        """Increasing with ``sum_k sqrt(k / beta^k) < inf``."""
        if self.kind == "super_linear":
            return self.epsilon > 0
        if self.kind == "power":
            # sum k^((1 - e) / 2) converges iff e > 3
            return self.exponent > 3
        return False

    def check_increasing(self, n):
        values = [self.value(k) for k in range(1, n + 2)]
        return all(b > a for a, b in zip(values, values[1:]))

    def describe(self):
        if self.kind == "constant":
            return f"constant(beta0={self.beta0:g})"
        if self.kind == "power":
            return f"power(beta0={self.beta0:g},exponent={self.exponent:g})"
        return f"super_linear(beta0={self.beta0:g},epsilon={self.epsilon:g})"


def default_schedule(variant):
    if variant == "iso_tv_baseline":
        return PenaltySchedule("constant", beta0=10.0)
    return PenaltySchedule("super_linear")


@dataclass(frozen=True)
class SolverConfig:
    mu: float = 0.01
    variant: str = "aniso_l0"
    schedule: Optional[PenaltySchedule] = None
    rel_change_tol: float = 1e-3
    max_outer_iterations: int = 500
    cg: CgConfig = field(default_factory=CgConfig)
    boundary: BoundaryCondition = BoundaryCondition.DIRICHLET_ZERO
    # beta_s / beta_t, anisotropic only
    beta_ratio: float = 1.0
    init: str = "adjoint"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        if not self.mu > 0:
            raise ConfigurationError(f"mu must be positive, got {self.mu}")
        if not 0 < self.rel_change_tol < 1:
            raise ConfigurationError("rel_change_tol must lie in (0, 1)")
        if self.max_outer_iterations < 1:
            raise ConfigurationError("max_outer_iterations must be positive")
        if not self.beta_ratio > 0:
            raise ConfigurationError("beta_ratio must be positive")
        if self.init not in ("adjoint", "bilinear", "zero"):
            raise ConfigurationError(f"unknown init {self.init!r}")
        if self.schedule is None:
            object.__setattr__(self, "schedule", default_schedule(self.variant))
        object.__setattr__(self, "boundary", BoundaryCondition(self.boundary))

    @property
    def p(self):
        return 1 if self.variant == "aniso_l0" else 2

    def as_dict(self):
        d = asdict(self)
        d["boundary"] = self.boundary.value
        return d

    def digest(self):
        text = repr(sorted(_flatten(self.as_dict()).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[f"{prefix}{k}"] = v
    return out


@dataclass
class AdmmState:
    """Iterate of the ADMM loop.

    For the isotropic variants ``(t, s)`` are the two components of ``z`` and
    ``(lambda_t, lambda_s)`` those of ``lambda``.
    """

    u: np.ndarray
    t: np.ndarray
    s: np.ndarray
    lambda_t: np.ndarray
    lambda_s: np.ndarray
    k: int = 0
    beta_t: float = 0.0
    beta_s: float = 0.0

    @property
    def z(self):
        return np.stack([self.t, self.s])

    @property
    def lam(self):
        return np.stack([self.lambda_t, self.lambda_s])


# -- objective ---------------------------------------------------------------

def _check_shapes(u, g, A):
    if u.shape != A.input_shape:
        raise DimensionError(f"u shape {u.shape} != operator input {A.input_shape}")
    if g.shape != A.output_shape:
        raise DimensionError(f"g shape {g.shape} != operator output {A.output_shape}")


def count_jumps(dh, dv, p, tol=ZERO_TOL):
    nz_h = np.abs(dh) > tol
    nz_v = np.abs(dv) > tol
    if p == 1:
        return int(nz_h.sum() + nz_v.sum())
    if p == 2:
        return int((nz_h | nz_v).sum())
    raise ConfigurationError(f"p must be 1 or 2, got {p}")


def jump_count(u, Dh, Dv, p, tol=ZERO_TOL):
    """Number of nonzero gradient entries (``p=1``) or gradient pixels (``p=2``)."""
    return count_jumps(Dh.apply(u), Dv.apply(u), p, tol)


def fidelity(u, g, A):
    r = A.apply(u) - g
    return 0.5 * float(np.vdot(r, r))


def objective(u, g, A, Dh, Dv, mu, p, tol=ZERO_TOL):
    u = np.asarray(u, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    _check_shapes(u, g, A)
    return fidelity(u, g, A) + mu * jump_count(u, Dh, Dv, p, tol)


def tv_objective(u, g, A, Dh, Dv, mu):
    u = np.asarray(u, dtype=np.float64)
    _check_shapes(u, np.asarray(g), A)
    return fidelity(u, g, A) + mu * float(np.hypot(Dh.apply(u), Dv.apply(u)).sum())


# -- diagnostics -------------------------------------------------------------

def residual_bound_ratio(state, mu, N, Dh):
    """``||t - Dh u - lambda_t/beta_t|| / sqrt(2 mu N / beta_t)``.

    ``state`` must hold ``u = u^k``, ``lambda_t = lambda_t^k`` and
    ``t = t^{k+1}``, i.e. be taken right after the ``t`` update.
    """
    f = Dh.apply(state.u) + state.lambda_t / state.beta_t
    lhs = float(np.linalg.norm(state.t - f))
    return lhs / math.sqrt(2.0 * mu * N / state.beta_t)


def theorem_residual_bound_check(state, mu, N, Dh):
    return residual_bound_ratio(state, mu, N, Dh) <= 1.0


def _pair_bound_ratio(state, mu, N, Dh, Dv):
    fh = Dh.apply(state.u) + state.lambda_t / state.beta_t
    fv = Dv.apply(state.u) + state.lambda_s / state.beta_t
    lhs = math.sqrt(float(np.vdot(state.t - fh, state.t - fh) + np.vdot(state.s - fv, state.s - fv)))
    return lhs / math.sqrt(2.0 * mu * N / state.beta_t)


# -- the solver loop ---------------------------------------------------------

def initial_guess(g, S, kind="adjoint"):
    """Starting point ``u^0``: ``S^T g``, bilinear upsampling of ``g``, or zero."""
    if kind == "adjoint":
        return S.apply_adjoint(g)
    if kind == "zero":
        return np.zeros(S.input_shape)
    if kind == "bilinear":
        from scipy import ndimage
        zoom = (S.input_shape[0] / g.shape[0], S.input_shape[1] / g.shape[1])
        return ndimage.zoom(g, zoom, order=1, mode="nearest", grid_mode=True)
    raise ConfigurationError(f"unknown init {kind!r}")


def trace_header(cfg, variant):
    sched = cfg.schedule
    header = {
        "config_hash": cfg.digest(),
        "variant": variant,
        "mu": repr(cfg.mu),
        "schedule": sched.describe(),
        "gradient_boundary": cfg.boundary.value,
        "beta_ratio": repr(cfg.beta_ratio),
    }
    warnings = []
    if variant != "iso_tv_baseline" and not sched.satisfies_growth_condition:
        warnings.append("schedule violates the penalty growth condition; convergence not guaranteed")
    if cfg.boundary is BoundaryCondition.PERIODIC:
        warnings.append("periodic gradient boundary: D is rank deficient, outside convergence hypotheses")
    if warnings:
        header["warnings"] = "; ".join(warnings)
    return header


def iterate(g, A, Dh, Dv, cfg, u0=None):
    """Run the ADMM loop for ``cfg.variant``, yielding after every iteration.

    Yields ``(state, record, extras)`` where ``state`` is the end-of-iteration
    :class:`AdmmState` (``u^{k+1}``, ``t^{k+1}``, ``lambda^{k+1}`` with the
    penalties ``beta^k`` that produced them), ``record`` the
    :class:`TraceRecord`, and ``extras`` a dict with ``bound_ratio`` and
    ``cg_converged``.
    """
    variant = cfg.variant
    g = np.asarray(g, dtype=np.float64)
    if g.shape != A.output_shape:
        raise DimensionError(f"g shape {g.shape} != operator output {A.output_shape}")
    shape = A.input_shape
    if Dh.input_shape != shape or Dv.input_shape != shape:
        raise DimensionError("gradient operators do not match the HR grid")
    N = shape[0] * shape[1]
    mu = cfg.mu
    p = cfg.p
    ratio = cfg.beta_ratio if variant == "aniso_l0" else 1.0

    u = A.apply_adjoint(g) if u0 is None else np.array(u0, dtype=np.float64)
    if u.shape != shape:
        raise DimensionError(f"u0 shape {u.shape} != HR shape {shape}")
    zeros = np.zeros(shape)
    state = AdmmState(u, zeros.copy(), zeros.copy(), zeros.copy(), zeros.copy())
    start = time.perf_counter()

    for k in range(1, cfg.max_outer_iterations + 1):
        beta_t = cfg.schedule.value(k)
        beta_s = ratio * beta_t
        u_prev = state.u
        dh, dv = Dh.apply(u_prev), Dv.apply(u_prev)
        fh = dh + state.lambda_t / beta_t
        fv = dv + state.lambda_s / beta_s

        if variant == "aniso_l0":
            t = hard_threshold_plane(fh, 2.0 * mu / beta_t)
            s = hard_threshold_plane(fv, 2.0 * mu / beta_s)
        elif variant == "iso_l0":
            t, s = hard_threshold_pair(fh, fv, 2.0 * mu / beta_t)
        else:
            t, s = group_soft_threshold_pair(fh, fv, 2.0 * mu / beta_t)

        mid = AdmmState(u_prev, t, s, state.lambda_t, state.lambda_s, k, beta_t, beta_s)
        if variant == "aniso_l0":
            bound_ratio = max(
                residual_bound_ratio(mid, mu, N, Dh),
                residual_bound_ratio(
                    AdmmState(u_prev, s, t, state.lambda_s, state.lambda_t, k, beta_s, beta_t),
                    mu, N, Dv),
            )
        elif variant == "iso_l0":
            bound_ratio = _pair_bound_ratio(mid, mu, N, Dh, Dv)
        else:
            bound_ratio = float("nan")

        apply_M = make_admm_normal_operator(A, Dh, Dv, beta_t, beta_s)
        rhs = make_admm_rhs(A, Dh, Dv, g, t, s, state.lambda_t, state.lambda_s, beta_t, beta_s)
        u_new, report = solve_spd(apply_M, rhs, u_prev, cfg.cg)

        dh_new, dv_new = Dh.apply(u_new), Dv.apply(u_new)
        lambda_t = state.lambda_t - beta_t * (t - dh_new)
        lambda_s = state.lambda_s - beta_s * (s - dv_new)

        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(lambda_t))
                and np.all(np.isfinite(lambda_s))):
            raise NumericalError(f"non-finite state at iteration {k}", iteration=k)

        prev_norm = float(np.linalg.norm(u_prev))
        rel_change = float(np.linalg.norm(u_new - u_prev)) / max(prev_norm, 1e-12)
        fid = fidelity(u_new, g, A)
        if variant == "iso_tv_baseline":
            obj = fid + mu * float(np.hypot(dh_new, dv_new).sum())
        else:
            obj = fid + mu * count_jumps(dh_new, dv_new, p)
        record = TraceRecord(
            iter=k,
            beta=beta_t,
            objective=obj,
            fidelity=fid,
            jump_count=count_jumps(dh_new, dv_new, p),
            residual_h=float(np.linalg.norm(dh_new - t)),
            residual_v=float(np.linalg.norm(dv_new - s)),
            rel_change=rel_change,
            cg_iters=report.iterations_used,
            wall_ms=(time.perf_counter() - start) * 1e3,
        )
        state = AdmmState(u_new, t, s, lambda_t, lambda_s, k, beta_t, beta_s)
        yield state, record, {"bound_ratio": bound_ratio, "cg_converged": report.converged}


def run(g, A, Dh, Dv, cfg, u0=None, callback=None):
    """Iterate until the relative change drops below tolerance.

    Returns ``(u, trace)``. ``callback(state, record, extras)`` is invoked
    after every iteration when given.
    """
    trace = ConvergenceTrace(header=trace_header(cfg, cfg.variant))
    max_ratio = 0.0
    state = None
    for state, record, extras in iterate(g, A, Dh, Dv, cfg, u0):
        trace.records.append(record)
        ratio = extras["bound_ratio"]
        if not math.isnan(ratio):
            max_ratio = max(max_ratio, ratio)
            if ratio > 1.0:
                trace.bound_violations.append(record.iter)
        if not extras["cg_converged"]:
            trace.cg_failures.append(record.iter)
        if callback is not None:
            callback(state, record, extras)
        if record.rel_change < cfg.rel_change_tol:
            trace.converged = True
            break
    if cfg.variant != "iso_tv_baseline":
        trace.max_bound_ratio = max_ratio
    trace.final_residual_h = trace.records[-1].residual_h
    trace.final_residual_v = trace.records[-1].residual_v
    return state.u, trace


def _require_variant(cfg, variant):
    if cfg.variant != variant:
        raise ConfigurationError(f"config variant {cfg.variant!r} does not match {variant!r}")


def solve_aniso(g, A, Dh, Dv, cfg, u0=None, callback=None):
    _require_variant(cfg, "aniso_l0")
    return run(g, A, Dh, Dv, cfg, u0, callback)


def solve_iso(g, A, Dh, Dv, cfg, u0=None, callback=None):
    _require_variant(cfg, "iso_l0")
    return run(g, A, Dh, Dv, cfg, u0, callback)


def solve_itv_baseline(g, A, Dh, Dv, cfg, u0=None, callback=None):
    _require_variant(cfg, "iso_tv_baseline")
    return run(g, A, Dh, Dv, cfg, u0, callback)
