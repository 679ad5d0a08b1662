"""JSONL manifest I/O and invariant validation.

One AnnotatedImage per line. There is no header line; count checks are the
CLI's job. Schema (per line):

    {
      "id": str,
      "image": {"path": str} | {"png_base64": str},
      "label": "real" | "fake",
      "content_type": "human" | "object" | "animal" | "scene",
      "generator": str | null,
      "regions": [
        {
          "location": str,
          "artifact_type": "physics" | "distortion" | "structure",
          "explanation": str,
          "polygons": [[[x, y], ...], ...]
        }
      ]
    }
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

from forgeline.annotations.types import (
    ARTIFACT_TYPES,
    CONTENT_TYPES,
    LABELS,
    AnnotatedImage,
    ArtifactRegion,
    ArtifactType,
    DatasetManifest,
    ImageRef,
    Polygon,
)
from forgeline.errors import ManifestIOError, ValidationError


@dataclass
class Violation:
    entry_id: str
    field_path: str
    message: str

    def to_dict(self) -> dict:
        return {"entry_id": self.entry_id, "field_path": self.field_path, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, entry_id: str, field_path: str, message: str):
        self.violations.append(Violation(entry_id, field_path, message))

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def entry_to_dict(entry: AnnotatedImage) -> dict:
    image = (
        {"path": entry.image_ref.path}
        if entry.image_ref.path is not None
        else {"png_base64": entry.image_ref.png_base64}
    )
    return {
        "id": entry.id,
        "image": image,
        "label": entry.label,
        "content_type": entry.content_type,
        "generator": entry.generator,
        "regions": [
            {
                "location": r.location,
                "artifact_type": r.artifact_type.value,
                "explanation": r.explanation,
                "polygons": [[[x, y] for x, y in p.vertices] for p in r.polygons],
            }
            for r in entry.regions
        ],
    }


def entry_from_dict(raw: dict) -> AnnotatedImage:
    image = raw.get("image") or {}
    regions = [
        ArtifactRegion(
            location=r.get("location", ""),
            polygons=[Polygon(tuple((x, y) for x, y in poly)) for poly in r.get("polygons", [])],
            artifact_type=ArtifactType.parse(r.get("artifact_type", "")),
            explanation=r.get("explanation", ""),
        )
        for r in raw.get("regions", [])
    ]
    return AnnotatedImage(
        id=raw["id"],
        image_ref=ImageRef(path=image.get("path"), png_base64=image.get("png_base64")),
        label=raw["label"],
        content_type=raw["content_type"],
        regions=regions,
        generator=raw.get("generator"),
    )


def save_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in manifest.entries:
            fh.write(json.dumps(entry_to_dict(entry), ensure_ascii=False) + "\n")


def load_manifest(path, split: str = "unsplit") -> DatasetManifest:
    """Strictly parse a JSONL manifest.

    Raises ManifestIOError when the file is unreadable or not JSONL, and
    ValidationError (with line context) on the first invalid entry. Use
    validate_manifest_file to collect every violation instead.
    """
    entries = []
    seen: set[str] = set()
    for lineno, raw in load_raw_entries(path):
        try:
            entry = entry_from_dict(raw)
        except (ValidationError, KeyError, TypeError) as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if entry.id in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate id {entry.id!r}")
        seen.add(entry.id)
        entries.append(entry)
    return DatasetManifest(entries=entries, split=split)


def load_raw_entries(path) -> list[tuple[int, dict]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ManifestIOError(f"cannot read manifest {path}: {exc}") from exc
    out = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestIOError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ManifestIOError(f"{path}:{lineno}: entry must be a JSON object")
        out.append((lineno, raw))
    return out


def validate_manifest_file(path) -> ValidationReport:
    """Collect every invariant violation in a manifest file.

    Works on the raw JSON so that invalid entries (which the strict loader
    rejects) are still reported with entry id and field path. Unreadable
    lines (broken JSON, non-object rows) become violations too; only a
    file-level read failure raises.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ManifestIOError(f"cannot read manifest {path}: {exc}") from exc

    report = ValidationReport()
    rows: list[tuple[int, dict]] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            report.add(f"<line {lineno}>", "", f"not valid JSON: {exc}")
            continue
        if not isinstance(raw, dict):
            report.add(f"<line {lineno}>", "", "entry must be a JSON object")
            continue
        rows.append((lineno, raw))

    seen_ids: set[str] = set()
    for lineno, raw in rows:
        entry_id = str(raw.get("id", f"<line {lineno}>"))
        if "id" not in raw:
            report.add(entry_id, "id", "missing id")
        elif raw["id"] in seen_ids:
            report.add(entry_id, "id", "duplicate id")
        else:
            seen_ids.add(raw["id"])

        label = raw.get("label")
        if label not in LABELS:
            report.add(entry_id, "label", f"unknown label: {label!r}")
        content_type = raw.get("content_type")
        if content_type not in CONTENT_TYPES:
            report.add(entry_id, "content_type", f"unknown content type: {content_type!r}")

        image = raw.get("image")
        if not isinstance(image, dict) or ("path" in image) == ("png_base64" in image):
            report.add(entry_id, "image", "image ref needs exactly one of path / png_base64")

        regions = raw.get("regions", [])
        if label == "real" and regions:
            report.add(entry_id, "regions", "real image has regions")
        for ri, region in enumerate(regions):
            prefix = f"regions[{ri}]"
            if not isinstance(region, dict):
                report.add(entry_id, prefix, "region must be an object")
                continue
            atype = region.get("artifact_type")
            if atype not in ARTIFACT_TYPES:
                report.add(entry_id, f"{prefix}.artifact_type", f"unknown artifact type: {atype!r}")
            explanation = region.get("explanation")
            if not isinstance(explanation, str) or not explanation.strip():
                report.add(entry_id, f"{prefix}.explanation", "explanation must be non-empty")
            polygons = region.get("polygons", [])
            if not polygons:
                report.add(entry_id, f"{prefix}.polygons", "region needs at least one polygon")
            for pi, poly in enumerate(polygons):
                ppath = f"{prefix}.polygons[{pi}]"
                if not isinstance(poly, list) or len(poly) < 3:
                    report.add(entry_id, ppath, "polygon needs >=3 vertices")
                    continue
                for vertex in poly:
                    if (
                        not isinstance(vertex, (list, tuple))
                        or len(vertex) != 2
                        or not all(isinstance(c, (int, float)) for c in vertex)
                        or not all(math.isfinite(float(c)) for c in vertex)
                    ):
                        report.add(entry_id, ppath, f"bad vertex: {vertex!r}")
                        break
    return report


def validate_manifest(manifest: DatasetManifest) -> ValidationReport:
    """Re-check cross-entry invariants of an already constructed manifest.

    Per-entry invariants are enforced at construction; what remains is id
    uniqueness (and anything a caller may have mutated afterwards).
    """
    report = ValidationReport()
    seen: set[str] = set()
    for entry in manifest.entries:
        if entry.id in seen:
            report.add(entry.id, "id", "duplicate id")
        seen.add(entry.id)
        if entry.label == "real" and entry.regions:
            report.add(entry.id, "regions", "real image has regions")
        for ri, region in enumerate(entry.regions):
            if not region.polygons:
                report.add(entry.id, f"regions[{ri}].polygons", "region needs at least one polygon")
            if not region.explanation.strip():
                report.add(entry.id, f"regions[{ri}].explanation", "explanation must be non-empty")
    return report


def clamp_polygons(manifest: DatasetManifest, dims: dict[str, tuple[int, int]]) -> DatasetManifest:
    """Clamp out-of-bounds vertices into [0, W] x [0, H] per image.

    dims maps entry id -> (width, height). Emits a warning per clamped entry;
    annotations that merely touch the border are common and kept.
    """
    for entry in manifest.entries:
        if entry.id not in dims:
            continue
        width, height = dims[entry.id]
        for region in entry.regions:
            clamped = []
            changed = False
            for poly in region.polygons:
                new = poly.clamped(width, height)
                changed = changed or new.vertices != poly.vertices
                clamped.append(new)
            if changed:
                warnings.warn(f"clamped out-of-bounds polygon vertices in entry {entry.id!r}")
            region.polygons = clamped
    return manifest
