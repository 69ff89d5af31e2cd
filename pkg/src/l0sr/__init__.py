"""l0-gradient regularized super-resolution with ADMM.

The degradation model is ``g = S H u + noise`` with a Gaussian blur ``H`` and
an antialiased downsampler ``S``; reconstructions minimize
``0.5 * ||S H u - g||^2 + mu * ||D u||_{0,p}`` where ``D`` is the forward
difference gradient and ``p`` selects anisotropic (1) or isotropic (2) jump
counting.
"""
from .admm import (
    AdmmState, PenaltySchedule, SolverConfig, jump_count, objective, solve_aniso, solve_iso,
    solve_itv_baseline, theorem_residual_bound_check,
)
from .cg import CgConfig, make_admm_normal_operator, make_admm_rhs, solve_spd
from .errors import (
    ConfigurationError, DimensionError, ImageFormatError, NumericalError, TruncatedImageError,
)
from .iio import read_image, write_image
from .metrics import jaccard, kmeans_labels, otsu_binarize, psnr, ssim
from .operators import (
    BlurSpec, BoundaryCondition, DownsampleSpec, make_blur, make_downsample, make_forward_model,
    make_gradient_h, make_gradient_v,
)
from .pipeline import super_resolve, upsample_baseline
from .prox import apply_prox_plane, group_soft_threshold, hard_threshold_1d, hard_threshold_2d
from .simulate import DegradationSpec, SyntheticPattern, degrade, make_pattern
from .trace import ConvergenceTrace

__version__ = "0.1.0"
