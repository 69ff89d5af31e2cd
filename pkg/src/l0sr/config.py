"""Experiment configuration as a flat ``section.key = value`` text file.

Every key has a default except the input (``input.path`` or
``input.pattern``). Sweep keys (``solver.mu``, ``solver.variant``) take
comma-separated lists.
"""
import hashlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .admm import PenaltySchedule, SolverConfig, default_schedule
from .cg import CgConfig
from .errors import ConfigurationError
from .operators import BlurSpec, BoundaryCondition, DownsampleSpec
from .simulate import DegradationSpec, SyntheticPattern

# key -> (default, help)
DEFAULTS: Dict[str, Tuple[str, str]] = {
    "input.path": ("", "input image (HR for simulate/bench, LR for solve)"),
    "input.pattern": ("", "synthetic HR pattern: qr_like_grid, piecewise_constant_blocks or single_edge"),
    "input.height": ("64", "synthetic pattern height"),
    "input.width": ("64", "synthetic pattern width"),
    "input.module_px": ("5", "qr_like_grid module size in pixels"),
    "input.n_blocks": ("6", "piecewise_constant_blocks region count"),
    "input.seed": ("42", "synthetic pattern seed"),
    "degrade.sigma_h": ("1.0", "Gaussian blur standard deviation"),
    "degrade.radius": ("", "blur radius (default ceil(3 sigma))"),
    "degrade.blur_boundary": ("periodic", "blur boundary: periodic or dirichlet_zero"),
    "degrade.factor": ("2", "downsampling factor L"),
    "degrade.kernel": ("lanczos3", "downsampling kernel: lanczos3, lanczos2 or box"),
    "degrade.noise_sigma": ("0.01", "noise standard deviation"),
    "degrade.seed": ("42", "noise seed"),
    "solver.variant": ("aniso_l0", "comma list of aniso_l0, iso_l0, iso_tv_baseline"),
    "solver.mu": ("0.01", "comma list of regularization weights"),
    "solver.schedule": ("", "penalty schedule kind (default per variant)"),
    "solver.beta0": ("", "schedule multiplier (default per variant)"),
    "solver.epsilon": ("1e-4", "super_linear growth epsilon"),
    "solver.exponent": ("0.5", "power schedule exponent"),
    "solver.rel_change_tol": ("1e-3", "outer stopping tolerance"),
    "solver.max_outer_iterations": ("500", "outer iteration cap"),
    "solver.cg_tol": ("1e-6", "CG relative tolerance"),
    "solver.cg_max_iter": ("200", "CG iteration cap"),
    "solver.boundary": ("dirichlet_zero", "gradient boundary: dirichlet_zero or periodic"),
    "solver.beta_ratio": ("1.0", "beta_s / beta_t for aniso_l0"),
    "solver.init": ("adjoint", "initial guess: adjoint, bilinear or zero"),
    "eval.sr": ("", "SR image to evaluate"),
    "eval.gt": ("", "ground-truth image"),
    "eval.trace": ("", "trace CSV supplying iterations and wall time"),
    "eval.binarize": ("false", "also report Otsu-binarized metrics"),
    "eval.kmeans_k": ("", "k-means class count for a label map"),
    "eval.crop": ("0", "border pixels removed from both images before scoring"),
    "eval.shape_tolerance": ("0", "largest per-axis shape difference absorbed by center cropping"),
    "output.dir": ("out", "output directory"),
    "output.format": ("png", "8-bit export format: png or pgm"),
}


def parse_flat(text):
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"config line {n}: expected 'key = value'")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigurationError(f"config line {n}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def format_flat(values):
    return "".join(f"{k} = {v}\n" for k, v in values.items())


def _bool(text, key):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"{key}: expected a boolean, got {text!r}")


def _num(values, key, kind):
    text = values[key]
    try:
        return kind(text)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None


def _opt(values, key, kind):
    return _num(values, key, kind) if values[key] != "" else None


@dataclass
class ExperimentConfig:
    values: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_sources(cls, file_text=None, overrides=None):
        values = {k: d for k, (d, _) in DEFAULTS.items()}
        if file_text:
            values.update(parse_flat(file_text))
        for k, v in (overrides or {}).items():
            if k not in DEFAULTS:
                raise ConfigurationError(f"unknown key {k!r}")
            if v is not None:
                values[k] = str(v)
        cfg = cls(values)
        cfg.validate()
        return cfg

    def to_text(self):
        return format_flat(self.values)

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def validate(self):
        self.degradation()
        self.solver_configs()
        if self.values["output.format"] not in ("png", "pgm"):
            raise ConfigurationError("output.format must be png or pgm")
        _bool(self.values["eval.binarize"], "eval.binarize")
        for key in ("eval.crop", "eval.shape_tolerance"):
            if _num(self.values, key, int) < 0:
                raise ConfigurationError(f"{key} must be nonnegative")

    # -- typed views ---------------------------------------------------------

    @property
    def input_path(self):
        return self.values["input.path"] or None

    def pattern(self):
        kind = self.values["input.pattern"]
        if not kind:
            return None
        return SyntheticPattern(kind, _num(self.values, "input.module_px", int),
                                _num(self.values, "input.n_blocks", int))

    def pattern_shape(self):
        return _num(self.values, "input.height", int), _num(self.values, "input.width", int)

    @property
    def pattern_seed(self):
        return _num(self.values, "input.seed", int)

    def degradation(self):
        v = self.values
        blur = BlurSpec(_num(v, "degrade.sigma_h", float), _opt(v, "degrade.radius", int),
                        _boundary(v["degrade.blur_boundary"], "degrade.blur_boundary"))
        factor = _num(v, "degrade.factor", int)
        if factor < 1:
            raise ConfigurationError("degrade.factor must be >= 1")
        if v["degrade.kernel"] not in ("lanczos3", "lanczos2", "box"):
            raise ConfigurationError(f"unknown degrade.kernel {v['degrade.kernel']!r}")
        if blur.sigma <= 0:
            raise ConfigurationError("degrade.sigma_h must be positive")
        return DegradationSpec(blur, DownsampleSpec(factor, v["degrade.kernel"]),
                               _num(v, "degrade.noise_sigma", float), _num(v, "degrade.seed", int))

    def solver_configs(self) -> List[SolverConfig]:
        """One config per (variant, mu) pair, variants outermost."""
        v = self.values
        variants = [x.strip() for x in v["solver.variant"].split(",") if x.strip()]
        try:
            mus = [float(x) for x in v["solver.mu"].split(",") if x.strip()]
        except ValueError:
            raise ConfigurationError(f"solver.mu: cannot parse {v['solver.mu']!r}") from None
        if not variants or not mus:
            raise ConfigurationError("solver.variant and solver.mu need at least one entry")
        cg = CgConfig(_num(v, "solver.cg_tol", float), _num(v, "solver.cg_max_iter", int))
        out = []
        for variant in variants:
            out.extend(
                SolverConfig(
                    mu=mu, variant=variant, schedule=self._schedule(variant),
                    rel_change_tol=_num(v, "solver.rel_change_tol", float),
                    max_outer_iterations=_num(v, "solver.max_outer_iterations", int),
                    cg=cg, boundary=_boundary(v["solver.boundary"], "solver.boundary"),
                    beta_ratio=_num(v, "solver.beta_ratio", float), init=v["solver.init"],
                )
                for mu in mus
            )
        return out

    def _schedule(self, variant):
        v = self.values
        if variant not in ("aniso_l0", "iso_l0", "iso_tv_baseline"):
            raise ConfigurationError(f"unknown variant {variant!r}")
        base = default_schedule(variant)
        kind = v["solver.schedule"] or base.kind
        beta0 = _opt(v, "solver.beta0", float)
        return PenaltySchedule(kind, base.beta0 if beta0 is None else beta0,
                               _num(v, "solver.exponent", float), _num(v, "solver.epsilon", float))

    @property
    def binarize(self):
        return _bool(self.values["eval.binarize"], "eval.binarize")

    @property
    def kmeans_k(self) -> Optional[int]:
        return _opt(self.values, "eval.kmeans_k", int)


def _boundary(text, key):
    try:
        return BoundaryCondition(text)
    except ValueError:
        raise ConfigurationError(f"{key}: unknown boundary {text!r}") from None
