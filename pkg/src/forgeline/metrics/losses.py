"""Training-loss formulas as pure numeric functions.

Stage 1 combines mask BCE, soft Dice, and token cross-entropy; stage 2 is
plain cross-entropy on the real/fake pair. Nothing here touches a model:
these exist so that loss values can be recomputed and checked exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from forgeline.annotations.types import BinaryMask

DICE_SMOOTH = 1e-6
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossWeights:
    lambda_bce: float
    lambda_dice: float
    lambda_ce: float

    def __post_init__(self):
        if min(self.lambda_bce, self.lambda_dice, self.lambda_ce) < 0:
            raise ValueError("loss weights must be >= 0")


# Token CE 1.0, Dice 0.2, mask BCE 0.4.
DEFAULT_WEIGHTS = LossWeights(lambda_bce=0.4, lambda_dice=0.2, lambda_ce=1.0)


@dataclass(frozen=True)
class LossBreakdown:
    bce: float
    dice: float
    token_ce: float
    total: float

    def to_dict(self) -> dict:
        return {"bce": self.bce, "dice": self.dice, "token_ce": self.token_ce, "total": self.total}


def _mask_bits(gt_mask) -> np.ndarray:
    if isinstance(gt_mask, BinaryMask):
        return gt_mask.bits
    return np.ascontiguousarray(gt_mask, dtype=np.uint8)


def bce_loss(probs: np.ndarray, gt: np.ndarray) -> float:
    """Mean binary cross-entropy; exact 0 for a perfect hard prediction."""
    p = probs.astype(np.float64)
    g = gt.astype(np.float64)
    terms = -(xlogy(g, p) + xlogy(1.0 - g, 1.0 - p))
    return float(terms.mean())


def dice_loss(probs: np.ndarray, gt: np.ndarray) -> float:
    """Soft Dice 1 - (2*sum(p*g) + s)/(sum(p) + sum(g) + s), s = 1e-6."""
    p = probs.astype(np.float64)
    g = gt.astype(np.float64)
    num = 2.0 * float((p * g).sum()) + DICE_SMOOTH
    den = float(p.sum()) + float(g.sum()) + DICE_SMOOTH
    return 1.0 - num / den


def token_ce_loss(pred_token_dists, gt_tokens) -> float:
    """Mean negative log-probability of the target tokens."""
    if len(gt_tokens) == 0:
        warnings.warn("empty token list: token CE defined as 0")
        return 0.0
    dists = np.asarray(pred_token_dists, dtype=np.float64)
    if dists.ndim != 2 or dists.shape[0] != len(gt_tokens):
        raise ValueError("need one probability vector per target token")
    sums = dists.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-6):
        raise ValueError("token distributions must sum to 1 within 1e-6")
    picked = dists[np.arange(len(gt_tokens)), np.asarray(gt_tokens, dtype=np.int64)]
    if np.any(picked <= 0.0):
        warnings.warn(f"zero probability of a target token; clamping at {PROB_FLOOR}")
        picked = np.maximum(picked, PROB_FLOOR)
    return float(-np.log(picked).mean())


def stage1_loss(pred_mask_probs, gt_mask, pred_token_dists, gt_tokens,
                w: LossWeights = DEFAULT_WEIGHTS) -> LossBreakdown:
    probs = np.asarray(pred_mask_probs, dtype=np.float64)
    gt = _mask_bits(gt_mask)
    if probs.shape != gt.shape:
        raise ValueError(f"raster dimension mismatch: {probs.shape} vs {gt.shape}")
    if probs.min(initial=0.0) < 0.0 or probs.max(initial=0.0) > 1.0:
        raise ValueError("mask probabilities must lie in [0, 1]")
    bce = bce_loss(probs, gt)
    dice = dice_loss(probs, gt)
    ce = token_ce_loss(pred_token_dists, gt_tokens)
    total = w.lambda_bce * bce + w.lambda_dice * dice + w.lambda_ce * ce
    return LossBreakdown(bce=bce, dice=dice, token_ce=ce, total=total)


def stage2_loss(pred_dist, gt: str) -> float:
    """-ln p(gt) for a probability pair over (real, fake)."""
    p_real, p_fake = float(pred_dist[0]), float(pred_dist[1])
    if abs(p_real + p_fake - 1.0) > 1e-6:
        raise ValueError("prediction pair must sum to 1 within 1e-6")
    if gt not in ("real", "fake"):
        raise ValueError(f"unknown label: {gt!r}")
    p = p_real if gt == "real" else p_fake
    if p <= 0.0:
        warnings.warn(f"zero probability of ground truth; clamping at {PROB_FLOOR}")
        p = PROB_FLOOR
    return -math.log(p)
