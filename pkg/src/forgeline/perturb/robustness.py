"""Robustness harness: analyzer quality across a degradation grid.

Runs the analyzer on every manifest image under each grid cell (one
degradation family + parameter), scores the reported masks against the
annotated ground truth, and tabulates macro mIoU / F1 per cell together
with the ratio to the undistorted row. A failing cell is recorded with
its error and the sweep continues.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from forgeline.annotations.manifest import DatasetManifest
from forgeline.annotations.raster import rasterize_regions
from forgeline.backends.protocol import AnalyzerReport
from forgeline.errors import ForgelineError, ValidationError
from forgeline.metrics.segmentation import segmentation_scores
from forgeline.perturb.ops import (
    BLUR_KSIZES,
    JPEG_QUALITIES,
    NOISE_SIGMAS,
    gaussian_blur,
    gaussian_noise,
    jpeg_compress,
)

FAMILIES = ("none", "jpeg", "noise", "blur")


@dataclass(frozen=True)
class GridCell:
    """One degradation setting; ``none`` is the undistorted baseline."""

    family: str
    param: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown degradation family: {self.family!r}")
        if (self.family == "none") != (self.param is None):
            raise ValidationError(
                f"family {self.family!r} and param {self.param!r} do not agree"
            )

    @property
    def label(self) -> str:
        if self.family == "none":
            return "No Distortion"
        if self.family == "jpeg":
            return f"JPEG Comp. (QF = {int(self.param)})"
        if self.family == "noise":
            return f"Gaussian Noise (σ = {self.param:g})"
        return f"Gaussian Blur (Ksize = {int(self.param)})"

    def apply(self, image: np.ndarray, seed: int, image_id: str) -> np.ndarray:
        if self.family == "none":
            return image
        if self.family == "jpeg":
            return jpeg_compress(image, int(self.param))
        if self.family == "noise":
            return gaussian_noise(image, float(self.param), _cell_seed(seed, self, image_id))
        return gaussian_blur(image, int(self.param))


def _cell_seed(seed: int, cell: GridCell, image_id: str) -> int:
    digest = hashlib.blake2b(
        f"{seed}|{cell.label}|{image_id}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def default_grid() -> list[GridCell]:
    cells = [GridCell("none")]
    cells += [GridCell("jpeg", float(q)) for q in JPEG_QUALITIES]
    cells += [GridCell("noise", s) for s in NOISE_SIGMAS]
    cells += [GridCell("blur", float(k)) for k in BLUR_KSIZES]
    return cells


def parse_grid(spec: str) -> list[GridCell]:
    """Parse a compact grid spec like ``jpeg:50,35;noise:0.1;blur:5``.

    The undistorted baseline row is always included first. The literal
    ``default`` yields the full standard grid.
    """
    spec = spec.strip()
    if not spec or spec == "default":
        return default_grid()
    cells = [GridCell("none")]
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        family, _, params = chunk.partition(":")
        family = family.strip()
        if family == "none":
            continue
        if not params:
            raise ValidationError(f"grid chunk {chunk!r} has no parameters")
        for token in params.split(","):
            try:
                value = float(token)
            except ValueError:
                raise ValidationError(
                    f"bad parameter {token!r} in grid chunk {chunk!r}"
                ) from None
            cells.append(GridCell(family, value))
    return cells


@dataclass
class RobustnessRow:
    label: str
    family: str
    param: float | None
    n: int = 0
    miou: float | None = None
    f1: float | None = None
    miou_ratio: float | None = None
    f1_ratio: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "family": self.family,
            "param": self.param,
            "n": self.n,
            "miou": self.miou,
            "f1": self.f1,
            "miou_ratio": self.miou_ratio,
            "f1_ratio": self.f1_ratio,
            "error": self.error,
        }


@dataclass
class RobustnessReport:
    seed: int
    rows: list[RobustnessRow] = field(default_factory=list)

    def row(self, label: str) -> RobustnessRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "seed": self.seed,
            "rows": [r.to_dict() for r in self.rows],
        }


def _report_union_mask(report: AnalyzerReport, height: int, width: int) -> np.ndarray:
    union = np.zeros((height, width), dtype=bool)
    for region in report.regions:
        union |= region.mask.bits.astype(bool)
    return union.astype(np.uint8)


def run_robustness(
    analyzer,
    manifest: DatasetManifest,
    images: dict[str, np.ndarray],
    *,
    grid: list[GridCell] | None = None,
    seed: int = 0,
) -> RobustnessReport:
    """Sweep the degradation grid; per-cell macro mIoU/F1 vs ground truth.

    Only fake entries with regions contribute (real images have no mask
    to score). ``images`` maps entry id to its decoded RGB array.
    """
    cells = list(grid) if grid is not None else default_grid()
    if not cells:
        raise ValidationError("degradation grid is empty")
    entries = [e for e in manifest.entries if e.label == "fake" and e.regions]
    if not entries:
        raise ValidationError("no fake entries with regions to evaluate")
    missing = [e.id for e in entries if e.id not in images]
    if missing:
        raise ValidationError(f"no image supplied for entries: {missing}")

    report = RobustnessReport(seed=seed)
    baseline: RobustnessRow | None = None
    for cell in cells:
        row = RobustnessRow(label=cell.label, family=cell.family, param=cell.param)
        mious: list[float] = []
        f1s: list[float] = []
        try:
            for entry in entries:
                image = images[entry.id]
                height, width = image.shape[:2]
                gt = rasterize_regions(entry.regions, width, height)
                degraded = cell.apply(image, seed, entry.id)
                analysis = analyzer.analyze(degraded, image_id=entry.id)
                pred = _report_union_mask(analysis, height, width)
                scores = segmentation_scores(pred, gt)
                mious.append(scores.miou)
                f1s.append(scores.f1)
        except ForgelineError as exc:
            row.error = f"{type(exc).__name__}: {exc}"
            report.rows.append(row)
            continue
        row.n = len(entries)
        row.miou = 100.0 * float(np.mean(mious))
        row.f1 = 100.0 * float(np.mean(f1s))
        if cell.family == "none":
            baseline = row
            row.miou_ratio = 1.0
            row.f1_ratio = 1.0
        elif baseline is not None and baseline.miou:
            row.miou_ratio = row.miou / baseline.miou
            row.f1_ratio = row.f1 / baseline.f1 if baseline.f1 else None
        report.rows.append(row)
    return report
