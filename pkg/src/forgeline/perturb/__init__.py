"""Degradation operators and the analyzer robustness sweep."""

from forgeline.perturb.ops import (
    BLUR_KSIZES,
    JPEG_QUALITIES,
    NOISE_SIGMAS,
    blur_sigma,
    gaussian_blur,
    gaussian_kernel_1d,
    gaussian_noise,
    jpeg_compress,
)
from forgeline.perturb.robustness import (
    FAMILIES,
    GridCell,
    RobustnessReport,
    RobustnessRow,
    default_grid,
    parse_grid,
    run_robustness,
)

__all__ = [
    "BLUR_KSIZES",
    "FAMILIES",
    "GridCell",
    "JPEG_QUALITIES",
    "NOISE_SIGMAS",
    "RobustnessReport",
    "RobustnessRow",
    "blur_sigma",
    "default_grid",
    "gaussian_blur",
    "gaussian_kernel_1d",
    "gaussian_noise",
    "jpeg_compress",
    "parse_grid",
    "run_robustness",
]
