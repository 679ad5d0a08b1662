"""Dataset statistics: image counts per content type, region counts per artifact type."""

from __future__ import annotations

from dataclasses import dataclass, field

from forgeline.annotations.types import ARTIFACT_TYPES, CONTENT_TYPES, DatasetManifest


@dataclass
class DatasetStats:
    images_by_content_type: dict[str, int] = field(default_factory=dict)
    images_by_label: dict[str, int] = field(default_factory=dict)
    regions_by_artifact_type: dict[str, int] = field(default_factory=dict)
    total_images: int = 0
    total_regions: int = 0

    def to_dict(self) -> dict:
        return {
            "images_by_content_type": self.images_by_content_type,
            "images_by_label": self.images_by_label,
            "regions_by_artifact_type": self.regions_by_artifact_type,
            "total_images": self.total_images,
            "total_regions": self.total_regions,
        }


def dataset_stats(manifest: DatasetManifest) -> DatasetStats:
    stats = DatasetStats(
        images_by_content_type={c: 0 for c in CONTENT_TYPES},
        images_by_label={"real": 0, "fake": 0},
        regions_by_artifact_type={a: 0 for a in ARTIFACT_TYPES},
    )
    for entry in manifest.entries:
        stats.images_by_content_type[entry.content_type] += 1
        stats.images_by_label[entry.label] += 1
        stats.total_images += 1
        for region in entry.regions:
            stats.regions_by_artifact_type[region.artifact_type.value] += 1
            stats.total_regions += 1
    return stats
