"""Command-line experiment runner: ``l0sr {simulate,solve,evaluate,bench}``.

Every option mirrors a flat config key (``--degrade.sigma_h 1.5``) and
overrides the value from ``--config FILE``. Exit status: 0 success,
1 validation error, 2 I/O error, 3 numerical failure or non-convergence.
"""
import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .admm import jump_count
from .config import DEFAULTS, ExperimentConfig
from .errors import ConfigurationError, DimensionError, ImageFormatError, NumericalError
from .image import clamp_to_unit, iter_planes
from .iio import read_image, write_image
from .metrics import jaccard, kmeans, otsu_binarize, psnr, ssim
from .operators import make_gradient_h, make_gradient_v
from .pipeline import super_resolve
from .simulate import degrade, make_pattern
from .trace import ConvergenceTrace

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERICAL = 0, 1, 2, 3


class NotConverged(Exception):
    pass


# -- helpers -----------------------------------------------------------------

def _outdir(cfg):
    path = cfg.values["output.dir"]
    os.makedirs(path, exist_ok=True)
    return path


def _export(img, stem, cfg):
    """Write the clamped 8-bit image and the raw float64 dump; return both paths."""
    fmt = cfg.values["output.format"]
    if fmt == "pgm" and np.ndim(img) == 3:
        fmt = "png"
    eight = f"{stem}.{fmt}"
    write_image(clamp_to_unit(img), eight)
    write_image(img, f"{stem}.f64")
    return eight, f"{stem}.f64"


def _write_kv(path, values):
    with open(path, "w") as fh:
        for k, v in values.items():
            fh.write(f"{k} = {v}\n")


def _load_hr(cfg):
    if cfg.input_path:
        return read_image(cfg.input_path)
    pattern = cfg.pattern()
    if pattern is None:
        raise ConfigurationError("set input.path or input.pattern")
    h, w = cfg.pattern_shape()
    return make_pattern(pattern, h, w, seed=cfg.pattern_seed)


def _entry_name(sc):
    return f"{sc.variant}_mu{sc.mu:g}"


def _is_binary(img):
    return bool(np.all((img == 0.0) | (img == 1.0)))


def _jump_counts(img):
    p1 = p2 = 0
    for plane in iter_planes(img):
        Dh, Dv = make_gradient_h(plane.shape), make_gradient_v(plane.shape)
        p1 += jump_count(plane, Dh, Dv, 1)
        p2 += jump_count(plane, Dh, Dv, 2)
    return p1, p2


def _solve_one(g, cfg, sc, root):
    """Solve one sweep entry into its own subdirectory."""
    deg = cfg.degradation()
    sub = os.path.join(root, _entry_name(sc))
    os.makedirs(sub, exist_ok=True)
    u, traces = super_resolve(g, deg.blur, deg.down, sc)
    _export(u, os.path.join(sub, "sr"), cfg)
    for c, tr in enumerate(traces):
        tr.header["experiment_hash"] = cfg.digest()
        name = "trace.csv" if len(traces) == 1 else f"trace_c{c}.csv"
        tr.write(os.path.join(sub, name))
    converged = all(tr.converged for tr in traces)
    _write_kv(os.path.join(sub, "run.txt"), {
        "variant": sc.variant, "mu": repr(sc.mu), "schedule": sc.schedule.describe(),
        "solver_hash": sc.digest(), "iterations": max(tr.iterations for tr in traces),
        "converged": converged,
    })
    return u, traces, converged


# -- metrics -----------------------------------------------------------------

@dataclass
class MetricsReport:
    psnr: float
    ssim: float
    jump_count_p1: int
    jump_count_p2: int
    jaccard: Optional[float] = None
    iterations: Optional[int] = None
    wall_ms: Optional[float] = None
    psnr_b: Optional[float] = None
    ssim_b: Optional[float] = None
    kmeans_inertia: Optional[float] = None

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    def to_text(self):
        return "".join(f"{k} = {v!r}\n" for k, v in self.as_dict().items())

    def to_csv(self):
        d = self.as_dict()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(d.keys())
        w.writerow(repr(v) for v in d.values())
        return buf.getvalue()


def _center_crop(img, shape):
    h, w = shape
    top = (img.shape[0] - h) // 2
    left = (img.shape[1] - w) // 2
    return img[top:top + h, left:left + w]


def align_for_scoring(sr, gt, crop=0, shape_tolerance=0):
    """Remove ``crop`` border pixels, then center-crop a small shape mismatch."""
    if crop:
        sr = sr[crop:-crop, crop:-crop]
        gt = gt[crop:-crop, crop:-crop]
    if sr.shape[2:] != gt.shape[2:]:
        raise DimensionError(f"channel counts differ: {sr.shape} vs {gt.shape}")
    dh, dw = abs(sr.shape[0] - gt.shape[0]), abs(sr.shape[1] - gt.shape[1])
    if max(dh, dw) > shape_tolerance:
        raise DimensionError(f"shapes {sr.shape} and {gt.shape} differ beyond the crop allowance")
    common = (min(sr.shape[0], gt.shape[0]), min(sr.shape[1], gt.shape[1]))
    if min(common) < 1:
        raise DimensionError("nothing left after cropping")
    return _center_crop(sr, common), _center_crop(gt, common)


def evaluate_images(sr, gt, binarize=False, kmeans_result=None, trace=None):
    """Compute a :class:`MetricsReport` of ``sr`` against ``gt``.

    ``kmeans_result`` and ``trace`` contribute optional fields when given.
    """
    if sr.shape != gt.shape:
        raise DimensionError(f"shape mismatch {sr.shape} vs {gt.shape}")
    p1, p2 = _jump_counts(sr)
    report = MetricsReport(psnr(sr, gt), ssim(sr, gt), p1, p2)
    single = sr.ndim == 2
    if single and _is_binary(gt):
        report.jaccard = jaccard(otsu_binarize(sr)[0], gt > 0.5)
    if binarize:
        if not single:
            raise ConfigurationError("binarized metrics need single-channel images")
        ms, mg = otsu_binarize(sr)[0], otsu_binarize(gt)[0]
        report.psnr_b = psnr(ms.astype(float), mg.astype(float))
        report.ssim_b = ssim(ms.astype(float), mg.astype(float))
        if report.jaccard is not None:
            report.jaccard = jaccard(ms, mg)
    if kmeans_result is not None:
        report.kmeans_inertia = kmeans_result.inertia_history[-1]
    if trace is not None and trace.records:
        report.iterations = trace.iterations
        report.wall_ms = trace.records[-1].wall_ms
    return report


# -- subcommands -------------------------------------------------------------

def cmd_simulate(cfg):
    out = _outdir(cfg)
    hr = _load_hr(cfg)
    spec = cfg.degradation()
    g = degrade(hr, spec)
    _export(hr, os.path.join(out, "hr"), cfg)
    _export(g, os.path.join(out, "lr"), cfg)
    _write_kv(os.path.join(out, "lr.meta.txt"), {
        "experiment_hash": cfg.digest(),
        "hr_shape": "x".join(map(str, hr.shape)),
        "lr_shape": "x".join(map(str, g.shape)),
        "sigma_h": repr(spec.blur.sigma),
        "blur_radius": spec.blur.resolved_radius(),
        "blur_boundary": spec.blur.boundary.value,
        "factor": spec.down.factor,
        "kernel": spec.down.kernel,
        "noise_sigma": repr(spec.noise_sigma),
        "seed": spec.seed,
    })
    with open(os.path.join(out, "config.txt"), "w") as fh:
        fh.write(cfg.to_text())
    return EXIT_OK


def cmd_solve(cfg):
    if not cfg.input_path:
        raise ConfigurationError("solve needs input.path (the LR image)")
    g = read_image(cfg.input_path)
    out = _outdir(cfg)
    with open(os.path.join(out, "config.txt"), "w") as fh:
        fh.write(cfg.to_text())
    failed = []
    for sc in cfg.solver_configs():
        _, traces, converged = _solve_one(g, cfg, sc, out)
        print(f"{_entry_name(sc)}: {max(t.iterations for t in traces)} iterations, "
              f"converged={converged}")
        if not converged:
            failed.append(_entry_name(sc))
    if failed:
        raise NotConverged("not converged: " + ", ".join(failed))
    return EXIT_OK


def cmd_evaluate(cfg):
    v = cfg.values
    if not v["eval.sr"] or not v["eval.gt"]:
        raise ConfigurationError("evaluate needs eval.sr and eval.gt")
    sr, gt = align_for_scoring(read_image(v["eval.sr"]), read_image(v["eval.gt"]),
                               int(v["eval.crop"]), int(v["eval.shape_tolerance"]))
    trace = ConvergenceTrace.read(v["eval.trace"]) if v["eval.trace"] else None
    km = kmeans(sr, cfg.kmeans_k) if cfg.kmeans_k else None
    report = evaluate_images(sr, gt, cfg.binarize, km, trace)
    out = _outdir(cfg)
    with open(os.path.join(out, "metrics.txt"), "w") as fh:
        fh.write(report.to_text())
    with open(os.path.join(out, "metrics.csv"), "w") as fh:
        fh.write(report.to_csv())
    if km is not None:
        write_image(km.labels / max(cfg.kmeans_k - 1, 1), os.path.join(out, "kmeans_labels.png"))
    sys.stdout.write(report.to_text())
    return EXIT_OK


BENCH_COLUMNS = ("variant", "mu", "iterations", "converged", "wall_ms", "psnr", "ssim", "jaccard",
                 "jump_count_p1", "jump_count_p2", "final_objective")


def cmd_bench(cfg):
    out = _outdir(cfg)
    hr = _load_hr(cfg)
    g = degrade(hr, cfg.degradation())
    with open(os.path.join(out, "config.txt"), "w") as fh:
        fh.write(cfg.to_text())
    rows, failed = [], []
    for sc in cfg.solver_configs():
        u, traces, converged = _solve_one(g, cfg, sc, out)
        report = evaluate_images(clamp_to_unit(u), hr)
        rows.append({
            "variant": sc.variant, "mu": repr(sc.mu),
            "iterations": max(t.iterations for t in traces), "converged": converged,
            "wall_ms": repr(sum(t.records[-1].wall_ms for t in traces)),
            "psnr": repr(report.psnr), "ssim": repr(report.ssim),
            "jaccard": "" if report.jaccard is None else repr(report.jaccard),
            "jump_count_p1": report.jump_count_p1, "jump_count_p2": report.jump_count_p2,
            "final_objective": repr(sum(t.records[-1].objective for t in traces)),
        })
        if not converged:
            failed.append(_entry_name(sc))
    with open(os.path.join(out, "bench.csv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(",".join(str(r[c]) for c in BENCH_COLUMNS))
    if failed:
        raise NotConverged("not converged: " + ", ".join(failed))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "solve": cmd_solve, "evaluate": cmd_evaluate, "bench": cmd_bench}


def build_parser():
    parser = argparse.ArgumentParser(prog="l0sr", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = subs.add_parser(name, help=fn.__name__.replace("cmd_", ""))
        p.add_argument("--config", help="flat key = value file providing defaults")
        for key, (default, text) in DEFAULTS.items():
            p.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE",
                           help=f"{text} (default: {default or 'unset'})")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k in DEFAULTS}
    try:
        text = None
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        cfg = ExperimentConfig.from_sources(text, overrides)
        return COMMANDS[args.command](cfg)
    except NumericalError as exc:
        where = f" at iteration {exc.iteration}" if getattr(exc, "iteration", None) else ""
        print(f"numerical failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NotConverged as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ImageFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigurationError, DimensionError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
