from forgeline.metrics.detection import (
    DetectionRecord,
    GrowthReport,
    detection_accuracy,
    growth_rate,
)
from forgeline.metrics.losses import (
    DEFAULT_WEIGHTS,
    LossBreakdown,
    LossWeights,
    stage1_loss,
    stage2_loss,
)
from forgeline.metrics.segmentation import (
    SegScore,
    aggregate_scores,
    scores_from_counts,
    segmentation_scores,
)
from forgeline.metrics.text import cosine_sim, css_score, rouge_l, tokenize

__all__ = [
    "DEFAULT_WEIGHTS",
    "DetectionRecord",
    "GrowthReport",
    "LossBreakdown",
    "LossWeights",
    "SegScore",
    "aggregate_scores",
    "cosine_sim",
    "css_score",
    "detection_accuracy",
    "growth_rate",
    "rouge_l",
    "scores_from_counts",
    "segmentation_scores",
    "stage1_loss",
    "stage2_loss",
    "tokenize",
]
