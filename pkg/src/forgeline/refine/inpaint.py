"""Region-wise inpainting refinement.

Each round analyzes the current image and repairs every reported region
through the inpainter backend. Two composition modes:

* ``paper_faithful`` — every region's patch is produced from the same
  round-start image, then the patches are composited in report order
  (overlapping pixels: last writer wins):

      image_next = image + sum_i mask_i * (inpaint(image, mask_i, expl_i) - image)

* ``sequential`` — each region's patch is produced from the image as
  already repaired by the previous regions of the same round, so later
  repairs see earlier ones.

The loop stops early when an analysis reports no regions; the final
image is always analyzed, so a run of ``iters`` rounds yields at most
``iters + 1`` iteration records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from forgeline.annotations.types import BinaryMask
from forgeline.backends.protocol import AnalyzerReport
from forgeline.backends.suite import BackendSuite
from forgeline.errors import ValidationError
from forgeline.refine.regen import report_artifact_pixels

DEFAULT_ITERS = 3
MODES = ("paper_faithful", "sequential")


def composite_region(base: np.ndarray, patch: np.ndarray, mask: BinaryMask) -> np.ndarray:
    """Merge ``patch`` into ``base`` on the masked pixels, byte-exact."""
    base = np.asarray(base)
    patch = np.asarray(patch)
    if base.shape != patch.shape:
        raise ValidationError(f"patch shape {patch.shape} != base shape {base.shape}")
    if (mask.height, mask.width) != base.shape[:2]:
        raise ValidationError(
            f"mask is {mask.width}x{mask.height}, image is "
            f"{base.shape[1]}x{base.shape[0]}"
        )
    out = base.copy()
    selected = mask.bits.astype(bool)
    out[selected] = patch[selected]
    return out


@dataclass
class InpaintIteration:
    """One analyzed image in an inpainting run."""

    index: int
    image: np.ndarray
    report: AnalyzerReport
    regions_repaired: int = 0
    score: float | None = None

    @property
    def artifact_pixels(self) -> int:
        return report_artifact_pixels(self.report)


@dataclass
class InpaintResult:
    mode: str = "paper_faithful"
    iterations: list[InpaintIteration] = field(default_factory=list)
    converged: bool = False

    @property
    def final_image(self) -> np.ndarray:
        return self.iterations[-1].image


def run_inpainting(
    suite: BackendSuite,
    image: np.ndarray,
    *,
    image_id: str | None = None,
    iters: int = DEFAULT_ITERS,
    mode: str = "paper_faithful",
    observer: Callable[[InpaintIteration], None] | None = None,
) -> InpaintResult:
    """Run the inpainting loop against the suite's backends.

    ``observer`` is invoked after each iteration record is appended, so a
    caller can persist progress before any backend failure propagates.
    """
    if iters < 1:
        raise ValidationError(f"iters must be >= 1, got {iters}")
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}, expected one of {MODES}")
    suite.require("analyzer", "inpainter")

    arr = np.asarray(image)
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(
            f"expected an 8-bit RGB image, got dtype={arr.dtype} shape={arr.shape}"
        )
    scorer = suite.get("scorer") if "scorer" in suite else None

    result = InpaintResult(mode=mode)
    current = arr

    for index in range(iters + 1):
        report = suite.analyzer.analyze(current, image_id=image_id)
        record = InpaintIteration(
            index=index,
            image=current,
            report=report,
            score=scorer.score(current, image_id=image_id) if scorer else None,
        )
        result.iterations.append(record)
        if observer is not None:
            observer(record)
        if not report.regions:
            result.converged = True
            break
        if index == iters:
            break

        if mode == "paper_faithful":
            merged = current
            for region in report.regions:
                patch = suite.inpainter.inpaint(
                    current,
                    region.mask,
                    region.explanation,
                    location=region.location,
                    image_id=image_id,
                )
                merged = composite_region(merged, patch, region.mask)
            current = merged
        else:
            for region in report.regions:
                patch = suite.inpainter.inpaint(
                    current,
                    region.mask,
                    region.explanation,
                    location=region.location,
                    image_id=image_id,
                )
                current = composite_region(current, patch, region.mask)
        record.regions_repaired = len(report.regions)

    return result
