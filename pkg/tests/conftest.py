"""Shared fixtures: paired image/reference workspaces and mock suites.

The central trick for deterministic pipeline tests: a "synthetic" image is
built from a clean reference by flipping the high bit of every pixel inside
the ground-truth rasters. The pixel diff against the reference then equals
the ground-truth mask exactly, so the oracle analyzer scores the original
at mIoU 1.0 and reports nothing once a region is restored to the reference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from forgeline.annotations.manifest import save_manifest
from forgeline.annotations.raster import rasterize_regions
from forgeline.annotations.types import (
    AnnotatedImage,
    ArtifactRegion,
    ArtifactType,
    DatasetManifest,
    ImageRef,
    Polygon,
)
from forgeline.backends.mocks import MockSuiteConfig, build_mock_suite


def gradient_image(height: int, width: int, phase: int = 0) -> np.ndarray:
    """Deterministic smooth RGB test image."""
    yy, xx = np.indices((height, width), dtype=np.int64)
    base = ((xx * 5 + yy * 3 + phase * 17) % 256).astype(np.uint8)
    green = base[::-1].copy()
    blue = ((base.astype(np.int64) + phase) % 256).astype(np.uint8)
    return np.stack([base, green, blue], axis=-1)


def random_mask(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    return (rng.random((height, width)) < rng.uniform(0.05, 0.95)).astype(np.uint8)


@dataclass
class PairedWorkspace:
    """A manifest of synthetic images plus their clean counterparts."""

    root: Path
    manifest_path: Path
    manifest: DatasetManifest
    images: dict[str, np.ndarray]
    references: dict[str, np.ndarray]
    gt_masks: dict[str, np.ndarray]
    backends_path: Path

    def entry_ids(self) -> list[str]:
        return [e.id for e in self.manifest.entries]


ARTIFACT_CYCLE = (ArtifactType.physics, ArtifactType.distortion, ArtifactType.structure)


def build_paired_workspace(
    root: Path,
    n_fake: int = 10,
    n_real: int = 0,
    *,
    size: tuple[int, int] = (32, 48),
    inline_every: int = 4,
    mock_options: dict | None = None,
) -> PairedWorkspace:
    """Write a manifest + images + references + backends config under root."""
    height, width = size
    (root / "images").mkdir(parents=True, exist_ok=True)
    refs_dir = root / "refs"
    refs_dir.mkdir(exist_ok=True)

    entries: list[AnnotatedImage] = []
    images: dict[str, np.ndarray] = {}
    references: dict[str, np.ndarray] = {}
    gt_masks: dict[str, np.ndarray] = {}

    for i in range(n_fake):
        image_id = f"img_{i:02d}"
        reference = gradient_image(height, width, phase=i)
        x0 = 4 + (i * 3) % 10
        y0 = 3 + (i * 2) % 8
        regions = [
            ArtifactRegion(
                location=f"patch {i} upper body",
                polygons=[Polygon((
                    (x0, y0), (x0 + 14, y0), (x0 + 14, y0 + 11), (x0, y0 + 11),
                ))],
                artifact_type=ARTIFACT_CYCLE[i % 3],
                explanation=f"contour {i} bends implausibly",
            )
        ]
        if i % 2 == 1:
            regions.append(
                ArtifactRegion(
                    location=f"patch {i} lower corner",
                    polygons=[Polygon((
                        (width - 12, height - 10), (width - 3, height - 10),
                        (width - 3, height - 3), (width - 12, height - 3),
                    ))],
                    artifact_type=ARTIFACT_CYCLE[(i + 1) % 3],
                    explanation=f"texture {i} is smeared",
                )
            )
        gt = rasterize_regions(regions, width, height).bits.astype(bool)
        fake = reference.copy()
        fake[gt] ^= 0x80

        Image.fromarray(reference).save(refs_dir / f"{image_id}.png")
        if i % inline_every == inline_every - 1:
            import base64
            import io

            buf = io.BytesIO()
            Image.fromarray(fake).save(buf, format="PNG")
            image_ref = ImageRef(png_base64=base64.b64encode(buf.getvalue()).decode("ascii"))
        else:
            Image.fromarray(fake).save(root / "images" / f"{image_id}.png")
            image_ref = ImageRef(path=f"images/{image_id}.png")

        entries.append(AnnotatedImage(
            id=image_id, image_ref=image_ref, label="fake",
            content_type=("human", "object", "animal", "scene")[i % 4],
            regions=regions, generator=f"gen-{i % 2}",
        ))
        images[image_id] = fake
        references[image_id] = reference
        gt_masks[image_id] = gt.astype(np.uint8)

    for j in range(n_real):
        image_id = f"real_{j:02d}"
        img = gradient_image(height, width, phase=100 + j)
        Image.fromarray(img).save(root / "images" / f"{image_id}.png")
        entries.append(AnnotatedImage(
            id=image_id, image_ref=ImageRef(path=f"images/{image_id}.png"),
            label="real", content_type="scene",
        ))
        images[image_id] = img

    manifest = DatasetManifest(entries=entries)
    manifest_path = root / "manifest.jsonl"
    save_manifest(manifest, manifest_path)

    mock = {"seed": 7, "references_dir": str(refs_dir)}
    mock.update(mock_options or {})
    backends_path = root / "backends.json"
    backends_path.write_text(json.dumps({"mock": mock}, indent=2))

    return PairedWorkspace(
        root=root, manifest_path=manifest_path, manifest=manifest,
        images=images, references=references, gt_masks=gt_masks,
        backends_path=backends_path,
    )


@pytest.fixture(scope="session")
def paired_workspace(tmp_path_factory) -> PairedWorkspace:
    """Ten synthetic/clean pairs with backends config; session-scoped, read-only."""
    root = tmp_path_factory.mktemp("paired")
    return build_paired_workspace(root, n_fake=10)


@pytest.fixture(scope="session")
def mock_suite(paired_workspace):
    """All-mock suite with the perfect inpainter, against the paired fixtures."""
    config = MockSuiteConfig(seed=7, inpainter="perfect")
    return build_mock_suite(
        paired_workspace.manifest, config, references=paired_workspace.references
    )
