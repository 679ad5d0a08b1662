"""Detection accuracy per generator group and HPS growth-rate arithmetic."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class DetectionRecord:
    id: str
    fake_prob: float
    label: str
    group: str

    def __post_init__(self):
        if not 0.0 <= self.fake_prob <= 1.0:
            raise ValueError(f"fake_prob out of range: {self.fake_prob}")
        if self.label not in ("real", "fake"):
            raise ValueError(f"unknown label: {self.label!r}")
        if not self.group:
            raise ValueError("group must be non-empty")


def detection_accuracy(records: list[DetectionRecord],
                       threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Accuracy per group and overall, on a 0-100 scale.

    Predicted fake iff fake_prob >= threshold (ties count as fake).
    """
    if not records:
        raise ValueError("no detection records")
    groups: dict[str, list[DetectionRecord]] = {}
    for rec in records:
        groups.setdefault(rec.group, []).append(rec)
    per_group = {}
    correct_total = 0
    for name, recs in sorted(groups.items()):
        correct = sum(
            1 for r in recs if ("fake" if r.fake_prob >= threshold else "real") == r.label
        )
        correct_total += correct
        per_group[name] = 100.0 * correct / len(recs)
    return {
        "threshold": threshold,
        "per_group": per_group,
        "overall": 100.0 * correct_total / len(records),
        "n": len(records),
    }


@dataclass(frozen=True)
class GrowthReport:
    pre_mean: float
    post_mean: float
    growth_ratio_of_means: float
    growth_per_sample_mean: float
    n: int

    def to_dict(self) -> dict:
        return {
            "pre_mean": self.pre_mean,
            "post_mean": self.post_mean,
            "growth_ratio_of_means": self.growth_ratio_of_means,
            "growth_per_sample_mean": self.growth_per_sample_mean,
            "n": self.n,
        }


def growth_rate(pre: list[float], post: list[float]) -> GrowthReport:
    """Growth of aligned scores, in percent, under both aggregations.

    ratio_of_means = (mean(post) - mean(pre)) / mean(pre) * 100
    per_sample_mean = mean_i of (post_i - pre_i) / pre_i * 100

    The two disagree in general; reports always carry both. Samples with
    pre_i = 0 are excluded from the per-sample mode with a warning.
    """
    if len(pre) != len(post) or not pre:
        raise ValueError("pre and post must be equally sized and non-empty")
    pre_mean = sum(pre) / len(pre)
    post_mean = sum(post) / len(post)
    if pre_mean == 0:
        raise ValueError("mean of pre-scores is 0; ratio of means undefined")
    ratio_of_means = (post_mean - pre_mean) / pre_mean * 100.0
    ratios = []
    for a, b in zip(pre, post):
        if a == 0:
            warnings.warn("sample with pre score 0 excluded from per-sample growth")
            continue
        ratios.append((b - a) / a * 100.0)
    per_sample = sum(ratios) / len(ratios) if ratios else 0.0
    return GrowthReport(
        pre_mean=pre_mean,
        post_mean=post_mean,
        growth_ratio_of_means=ratio_of_means,
        growth_per_sample_mean=per_sample,
        n=len(pre),
    )
