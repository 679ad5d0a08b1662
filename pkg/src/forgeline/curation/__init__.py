"""Dataset curation: feature clustering, stratified sampling, judge filtering."""

from forgeline.curation.cluster import DEFAULT_MAX_ITERS, KMeansResult, kmeans_cluster
from forgeline.curation.features import FeatureSet, extract_features
from forgeline.curation.judge import (
    FilterResult,
    JudgeDecision,
    JudgeLabel,
    judge_filter,
    load_artifact_prior,
    load_curation_prompt,
    parse_judge_label,
)
from forgeline.curation.sample import stratified_sample

__all__ = [
    "DEFAULT_MAX_ITERS",
    "FeatureSet",
    "FilterResult",
    "JudgeDecision",
    "JudgeLabel",
    "KMeansResult",
    "extract_features",
    "judge_filter",
    "kmeans_cluster",
    "load_artifact_prior",
    "load_curation_prompt",
    "parse_judge_label",
    "stratified_sample",
]
