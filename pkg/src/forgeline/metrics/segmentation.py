"""Pixel-level localization scoring: foreground/background IoU, mIoU, F1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from forgeline import kernels
from forgeline.annotations.types import BinaryMask


@dataclass(frozen=True)
class SegScore:
    """Per-image scores as ratios in [0, 1]; reports scale by 100."""

    iou_fg: float
    iou_bg: float
    miou: float
    f1: float

    def to_dict(self) -> dict:
        return {"iou_fg": self.iou_fg, "iou_bg": self.iou_bg, "miou": self.miou, "f1": self.f1}


def _as_bits(mask) -> np.ndarray:
    if isinstance(mask, BinaryMask):
        return mask.bits
    return np.ascontiguousarray(mask, dtype=np.uint8)


def segmentation_scores(pred, gt) -> SegScore:
    """Score a predicted mask against ground truth.

    IoU_fg = TP/(TP+FP+FN), IoU_bg on the complements, both with 0/0 -> 1.0
    (an empty prediction of an empty mask is a perfect match). F1 over the
    foreground with 0/0 -> 1.0 when both masks are empty, else 0 when the
    numerator is 0.
    """
    p, g = _as_bits(pred), _as_bits(gt)
    if p.shape != g.shape:
        raise ValueError(f"mask dimension mismatch: {p.shape} vs {g.shape}")
    tp, fp, fn, tn = kernels.confusion_counts(p, g)
    return scores_from_counts(tp, fp, fn, tn)


def scores_from_counts(tp: int, fp: int, fn: int, tn: int) -> SegScore:
    iou_fg = 1.0 if tp + fp + fn == 0 else tp / (tp + fp + fn)
    iou_bg = 1.0 if tn + fp + fn == 0 else tn / (tn + fp + fn)
    if 2 * tp + fp + fn == 0:
        f1 = 1.0
    else:
        f1 = 2 * tp / (2 * tp + fp + fn)
    return SegScore(iou_fg=iou_fg, iou_bg=iou_bg, miou=(iou_fg + iou_bg) / 2.0, f1=f1)


def aggregate_scores(per_image: dict[str, SegScore], counts: dict[str, tuple[int, int, int, int]]):
    """Macro (mean of per-image scores) and micro (pooled counts) aggregates.

    Both are emitted because "overall" F1 over a test set is ambiguous;
    macro is the headline number.
    """
    macro = {
        key: float(np.mean([getattr(s, key) for s in per_image.values()])) if per_image else 0.0
        for key in ("iou_fg", "iou_bg", "miou", "f1")
    }
    pooled = [sum(c[i] for c in counts.values()) for i in range(4)] if counts else [0, 0, 0, 0]
    micro = scores_from_counts(*pooled).to_dict()
    return {"macro": macro, "micro": micro}
