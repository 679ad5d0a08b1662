"""Iterative whole-image regeneration with feedback memory.

Round t analyzes the current image; any reported artifact explanations
are appended to the memory bank, the prompt is revised against the full
bank, and a fresh image is generated from the revised prompt:

    memory   <- memory + explanations(analyze(image_t))
    prompt   <- revise(prompt_t, memory)
    image    <- generate(prompt)

The loop stops early as soon as an analysis reports no regions. With
``max_iters`` regeneration rounds the result holds at most
``max_iters + 1`` iteration records, one per analyzed image (the last
generated image is always analyzed so the outcome is measured).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from forgeline.backends.protocol import AnalyzerReport
from forgeline.backends.suite import BackendSuite
from forgeline.errors import ValidationError
from forgeline.refine.memory import MemoryBank

DEFAULT_MAX_ITERS = 2


def report_artifact_pixels(report: AnalyzerReport) -> int:
    """Pixels covered by the union of the report's region masks."""
    if not report.regions:
        return 0
    union = np.zeros((report.regions[0].mask.height, report.regions[0].mask.width), bool)
    for region in report.regions:
        union |= region.mask.bits.astype(bool)
    return int(union.sum())


@dataclass
class RegenIteration:
    """One analyzed image in a regeneration run."""

    index: int
    prompt: str
    image: np.ndarray
    report: AnalyzerReport
    score: float | None = None

    @property
    def artifact_pixels(self) -> int:
        return report_artifact_pixels(self.report)


@dataclass
class RegenResult:
    iterations: list[RegenIteration] = field(default_factory=list)
    memory: list[str] = field(default_factory=list)
    converged: bool = False

    @property
    def final_image(self) -> np.ndarray:
        return self.iterations[-1].image

    @property
    def final_prompt(self) -> str:
        return self.iterations[-1].prompt


def run_regeneration(
    suite: BackendSuite,
    image: np.ndarray,
    prompt: str | None = None,
    *,
    image_id: str | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    observer: Callable[[RegenIteration], None] | None = None,
) -> RegenResult:
    """Run the regeneration loop against the suite's backends.

    When ``prompt`` is None the captioner produces the starting prompt.
    ``observer`` is invoked after each iteration record is appended, so a
    caller can persist progress before any backend failure propagates.
    """
    if max_iters < 1:
        raise ValidationError(f"max_iters must be >= 1, got {max_iters}")
    suite.require("analyzer", "reviser", "generator")
    if prompt is None:
        suite.require("captioner")

    arr = np.asarray(image)
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(
            f"expected an 8-bit RGB image, got dtype={arr.dtype} shape={arr.shape}"
        )
    height, width = arr.shape[:2]
    scorer = suite.get("scorer") if "scorer" in suite else None

    if prompt is None:
        prompt = suite.captioner.caption(arr)

    result = RegenResult()
    memory = MemoryBank()
    current = arr

    for index in range(max_iters + 1):
        report = suite.analyzer.analyze(current, image_id=image_id)
        record = RegenIteration(
            index=index,
            prompt=prompt,
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
        memory.extend_from_report(report)
        result.memory = memory.items()
        if index == max_iters:
            break
        prompt = suite.reviser.revise(prompt, memory.items())
        current = suite.generator.generate(prompt, width, height, image_id=image_id)

    result.memory = memory.items()
    return result
