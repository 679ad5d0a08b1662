"""Polygon rasterization onto binary masks.

A pixel (row i, column j) is set iff its center (j + 0.5, i + 0.5) lies
inside the polygon under the even-odd rule. Multiple polygons of one region
are rasterized independently and OR-combined.
"""

from __future__ import annotations

import numpy as np

from forgeline import kernels
from forgeline.annotations.types import ArtifactRegion, BinaryMask, Polygon
from forgeline.errors import ValidationError


def rasterize_polygon(polygon: Polygon, width: int, height: int) -> BinaryMask:
    if width < 1 or height < 1:
        raise ValidationError(f"target raster must be >=1x1, got {width}x{height}")
    xs = np.array([v[0] for v in polygon.vertices], dtype=np.float64)
    ys = np.array([v[1] for v in polygon.vertices], dtype=np.float64)
    return BinaryMask(kernels.fill_polygon(xs, ys, width, height))


def rasterize_region(region: ArtifactRegion, width: int, height: int) -> BinaryMask:
    mask = rasterize_polygon(region.polygons[0], width, height)
    for poly in region.polygons[1:]:
        mask = mask | rasterize_polygon(poly, width, height)
    return mask


def rasterize_regions(regions: list[ArtifactRegion], width: int, height: int) -> BinaryMask:
    """Union mask over every polygon of every region."""
    mask = BinaryMask.zeros(width, height)
    for region in regions:
        mask = mask | rasterize_region(region, width, height)
    return mask
