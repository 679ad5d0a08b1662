"""Uniform per-cluster sampling without replacement."""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping

import numpy as np

from forgeline.errors import ValidationError


def stratified_sample(
    assignments: Mapping[str, int],
    n_per_cluster: int,
    seed: int = 0,
) -> list[str]:
    """Draw up to ``n_per_cluster`` ids uniformly from every cluster.

    Clusters smaller than the quota contribute all their members. Each
    cluster draws from its own RNG stream (seeded on (seed, cluster)),
    so adding or removing one cluster never changes another's picks.
    Output order: ascending cluster, then the cluster's ids in sorted
    order.
    """
    if n_per_cluster < 0:
        raise ValidationError(f"n_per_cluster must be >= 0, got {n_per_cluster}")
    if n_per_cluster == 0:
        return []
    clusters: dict[int, list[str]] = defaultdict(list)
    for image_id, cluster in assignments.items():
        clusters[int(cluster)].append(image_id)

    selected: list[str] = []
    for cluster in sorted(clusters):
        members = sorted(clusters[cluster])
        if n_per_cluster >= len(members):
            selected.extend(members)
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, cluster]))
        picks = rng.choice(len(members), size=n_per_cluster, replace=False)
        selected.extend(members[i] for i in sorted(picks))
    return selected
