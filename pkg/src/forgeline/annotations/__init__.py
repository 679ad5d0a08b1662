from forgeline.annotations.images import (
    load_entry_image,
    load_manifest_images,
    save_image,
)
from forgeline.annotations.manifest import (
    ValidationReport,
    Violation,
    clamp_polygons,
    entry_from_dict,
    entry_to_dict,
    load_manifest,
    save_manifest,
    validate_manifest,
    validate_manifest_file,
)
from forgeline.annotations.raster import rasterize_polygon, rasterize_region, rasterize_regions
from forgeline.annotations.stats import DatasetStats, dataset_stats
from forgeline.annotations.types import (
    AnnotatedImage,
    ArtifactRegion,
    ArtifactType,
    BinaryMask,
    DatasetManifest,
    ImageRef,
    Polygon,
)

__all__ = [
    "load_entry_image",
    "load_manifest_images",
    "save_image",
    "AnnotatedImage",
    "ArtifactRegion",
    "ArtifactType",
    "BinaryMask",
    "DatasetManifest",
    "DatasetStats",
    "ImageRef",
    "Polygon",
    "ValidationReport",
    "Violation",
    "clamp_polygons",
    "dataset_stats",
    "entry_from_dict",
    "entry_to_dict",
    "load_manifest",
    "rasterize_polygon",
    "rasterize_region",
    "rasterize_regions",
    "save_manifest",
    "validate_manifest",
    "validate_manifest_file",
]
