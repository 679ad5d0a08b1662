"""Feature sets for dataset curation.

Vectors arrive from the embedder backend's image variant (one feature
per candidate image); the set keeps ids aligned with rows and enforces
a uniform dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from forgeline.errors import ConfigError, ValidationError


@dataclass
class FeatureSet:
    """Ids aligned one-to-one with rows of a (n, dim) float matrix."""

    ids: list[str]
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValidationError(
                f"feature matrix must be 2-D, got shape {self.vectors.shape}"
            )
        if len(self.ids) != self.vectors.shape[0]:
            raise ValidationError(
                f"{len(self.ids)} ids but {self.vectors.shape[0]} vectors"
            )
        if not self.ids:
            raise ValidationError("feature set is empty")
        if len(set(self.ids)) != len(self.ids):
            raise ValidationError("feature ids contain duplicates")
        if not np.all(np.isfinite(self.vectors)):
            raise ValidationError("feature vectors contain non-finite values")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


def extract_features(embedder, images: dict[str, np.ndarray]) -> FeatureSet:
    """Embed every image (sorted by id for a canonical order) through the
    embedder backend's image variant."""
    if not images:
        raise ValidationError("no images to extract features from")
    if not hasattr(embedder, "embed_image"):
        raise ConfigError(
            "the configured embedder does not support image payloads; "
            "curation feature extraction needs the /embed image variant"
        )
    ids = sorted(images)
    vectors = np.stack([np.asarray(embedder.embed_image(images[i]), float) for i in ids])
    return FeatureSet(ids=ids, vectors=vectors)
