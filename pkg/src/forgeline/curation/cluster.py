"""Seeded k-means clustering (k-means++ initialization, Lloyd updates).

Hand-rolled on purpose: the contract requires bit-for-bit deterministic
assignments under a seed and an exposed objective trajectory, which is
simpler to guarantee here than to pin across library versions. Runs
single-threaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from forgeline.curation.features import FeatureSet
from forgeline.errors import ValidationError

DEFAULT_MAX_ITERS = 100


@dataclass
class KMeansResult:
    ids: list[str]
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int
    converged: bool
    trajectory: list[float] = field(default_factory=list)

    def assignments(self) -> dict[str, int]:
        return {i: int(c) for i, c in zip(self.ids, self.labels)}

    def cluster_sizes(self) -> dict[int, int]:
        uniques, counts = np.unique(self.labels, return_counts=True)
        return {int(u): int(c) for u, c in zip(uniques, counts)}

    def to_dict(self) -> dict:
        return {
            "k": int(self.centers.shape[0]),
            "n": len(self.ids),
            "inertia": self.inertia,
            "n_iter": self.n_iter,
            "converged": self.converged,
            "trajectory": self.trajectory,
            "assignments": self.assignments(),
        }


def _init_centers_plusplus(
    vectors: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k-means++ seeding: first center uniform, the rest D^2-weighted."""
    n = vectors.shape[0]
    centers = np.empty((k, vectors.shape[1]), dtype=np.float64)
    centers[0] = vectors[rng.integers(n)]
    closest_sq = cdist(vectors, centers[:1], "sqeuclidean")[:, 0]
    for j in range(1, k):
        total = closest_sq.sum()
        if total <= 0.0:
            # all points coincide with chosen centers; fall back to uniform
            centers[j] = vectors[rng.integers(n)]
        else:
            idx = rng.choice(n, p=closest_sq / total)
            centers[j] = vectors[idx]
        closest_sq = np.minimum(
            closest_sq, cdist(vectors, centers[j : j + 1], "sqeuclidean")[:, 0]
        )
    return centers


def kmeans_cluster(
    features: FeatureSet,
    k: int,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> KMeansResult:
    """Cluster the feature set into k groups; deterministic under seed.

    The objective (sum of squared distances to assigned centers) is
    recorded after every assignment step and is non-increasing.
    """
    n = len(features)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValidationError(f"k={k} exceeds the number of points ({n})")
    if max_iters < 1:
        raise ValidationError(f"max_iters must be >= 1, got {max_iters}")

    vectors = features.vectors
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    centers = _init_centers_plusplus(vectors, k, rng)

    labels: np.ndarray | None = None
    trajectory: list[float] = []
    converged = False
    n_iter = 0

    for n_iter in range(1, max_iters + 1):
        d2 = cdist(vectors, centers, "sqeuclidean")
        new_labels = d2.argmin(axis=1)
        trajectory.append(float(d2[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        for j in range(k):
            members = vectors[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                # re-seat an empty cluster on the point farthest from its center
                distances = d2[np.arange(n), labels]
                centers[j] = vectors[int(distances.argmax())]

    assert labels is not None
    return KMeansResult(
        ids=list(features.ids),
        labels=labels,
        centers=centers,
        inertia=trajectory[-1],
        n_iter=n_iter,
        converged=converged,
        trajectory=trajectory,
    )
