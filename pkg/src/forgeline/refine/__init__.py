"""Iterative refinement pipelines: whole-image regeneration and region inpainting."""

from forgeline.refine.inpaint import (
    DEFAULT_ITERS,
    MODES,
    InpaintIteration,
    InpaintResult,
    composite_region,
    run_inpainting,
)
from forgeline.refine.memory import MemoryBank
from forgeline.refine.regen import (
    DEFAULT_MAX_ITERS,
    RegenIteration,
    RegenResult,
    report_artifact_pixels,
    run_regeneration,
)
from forgeline.refine.runlog import (
    load_log_schema,
    load_run_log,
    run_and_log_inpainting,
    run_and_log_regeneration,
    validate_run_log,
)

__all__ = [
    "DEFAULT_ITERS",
    "DEFAULT_MAX_ITERS",
    "InpaintIteration",
    "InpaintResult",
    "MODES",
    "MemoryBank",
    "RegenIteration",
    "RegenResult",
    "composite_region",
    "load_log_schema",
    "load_run_log",
    "report_artifact_pixels",
    "run_and_log_inpainting",
    "run_and_log_regeneration",
    "run_inpainting",
    "run_regeneration",
    "validate_run_log",
]
