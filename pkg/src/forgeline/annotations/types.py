"""Annotation data model: polygons, masks, regions, images, manifests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from forgeline import kernels
from forgeline.errors import CodecError, ValidationError

ARTIFACT_TYPES = ("physics", "distortion", "structure")
CONTENT_TYPES = ("human", "object", "animal", "scene")
LABELS = ("real", "fake")
SPLITS = ("train", "test", "unsplit")


class ArtifactType(str, Enum):
    physics = "physics"
    distortion = "distortion"
    structure = "structure"

    @classmethod
    def parse(cls, tag: str) -> "ArtifactType":
        try:
            return cls(tag)
        except ValueError:
            raise ValidationError(f"unknown artifact type: {tag!r}") from None


@dataclass(frozen=True)
class Polygon:
    """Vertex ring in pixel coordinates, origin top-left, y downward."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ValidationError(f"polygon needs >=3 vertices, got {len(verts)}")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValidationError(f"non-finite polygon coordinate ({x}, {y})")
        object.__setattr__(self, "vertices", verts)

    def clamped(self, width: int, height: int) -> "Polygon":
        """Clamp vertices into [0, W] x [0, H]."""
        return Polygon(
            tuple(
                (min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height)))
                for x, y in self.vertices
            )
        )

    def shoelace_area(self) -> float:
        xs = np.array([v[0] for v in self.vertices])
        ys = np.array([v[1] for v in self.vertices])
        return abs(float(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))) / 2.0

    def perimeter(self) -> float:
        pts = np.asarray(self.vertices)
        return float(np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1).sum())


class BinaryMask:
    """Row-major {0,1} raster of shape (height, width)."""

    __slots__ = ("bits",)

    def __init__(self, bits: np.ndarray):
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValidationError(f"mask must be 2-D and non-empty, got shape {bits.shape}")
        if bits.max(initial=0) > 1:
            raise ValidationError("mask values must be 0 or 1")
        self.bits = bits

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def area(self) -> int:
        return int(self.bits.sum())

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=np.uint8))

    def __or__(self, other: "BinaryMask") -> "BinaryMask":
        if other.bits.shape != self.bits.shape:
            raise ValidationError("mask dimension mismatch in OR")
        return BinaryMask(self.bits | other.bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryMask) and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"BinaryMask({self.width}x{self.height}, area={self.area})"

    def to_rle(self) -> dict:
        """Wire form: alternating run lengths starting with a zero run."""
        runs = kernels.rle_encode(self.bits)
        return {"counts": [int(r) for r in runs], "width": self.width, "height": self.height}

    @classmethod
    def from_rle(cls, rle: dict) -> "BinaryMask":
        counts = rle.get("counts")
        width = int(rle.get("width", 0))
        height = int(rle.get("height", 0))
        if counts is None or width < 1 or height < 1:
            raise CodecError(f"malformed RLE payload: {rle!r}")
        counts = [int(c) for c in counts]
        if any(c < 0 for c in counts):
            raise CodecError("negative run length")
        if sum(counts) != width * height:
            raise CodecError(
                f"run lengths sum to {sum(counts)}, expected {width * height}"
            )
        flat = kernels.rle_decode(np.asarray(counts, dtype=np.int64), width * height)
        return cls(flat.reshape(height, width))


@dataclass
class ArtifactRegion:
    """One annotated artifact: location phrase, polygon(s), type, explanation."""

    location: str
    polygons: list[Polygon]
    artifact_type: ArtifactType
    explanation: str

    def __post_init__(self):
        if not self.polygons:
            raise ValidationError("region needs at least one polygon")
        if not self.explanation.strip():
            raise ValidationError("region explanation must be non-empty")


@dataclass
class AnnotatedImage:
    id: str
    image_ref: "ImageRef"
    label: str
    content_type: str
    regions: list[ArtifactRegion] = field(default_factory=list)
    generator: str | None = None

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValidationError(f"unknown label: {self.label!r}")
        if self.content_type not in CONTENT_TYPES:
            raise ValidationError(f"unknown content type: {self.content_type!r}")
        if self.label == "real" and self.regions:
            raise ValidationError(f"real image {self.id!r} has regions")


@dataclass(frozen=True)
class ImageRef:
    """Either a filesystem path or inline base64 PNG bytes."""

    path: str | None = None
    png_base64: str | None = None

    def __post_init__(self):
        if (self.path is None) == (self.png_base64 is None):
            raise ValidationError("image ref needs exactly one of path / png_base64")


@dataclass
class DatasetManifest:
    entries: list[AnnotatedImage]
    split: str = "unsplit"

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValidationError(f"unknown split: {self.split!r}")
        seen: set[str] = set()
        for entry in self.entries:
            if entry.id in seen:
                raise ValidationError(f"duplicate image id: {entry.id!r}")
            seen.add(entry.id)

    def __len__(self):
        return len(self.entries)

    def by_id(self) -> dict[str, AnnotatedImage]:
        return {e.id: e for e in self.entries}
