"""Wire protocol: base64-PNG images, RLE masks, analyzer report schema.

All endpoints speak HTTP + JSON:

    POST /analyze  {image, image_id?}                  -> analyzer report
    POST /generate {prompt, width, height, image_id?}  -> {image}
    POST /inpaint  {image, mask, explanation, location?, image_id?} -> {image}
    POST /revise   {prompt, memory}                    -> {prompt}
    POST /caption  {image, prompt?}                    -> {text}
    POST /embed    {text}                              -> {vector, dim, model_id?}
    POST /score    {image, image_id?}                  -> {score}
    GET  /health                                       -> {status, ...}

Images are 8-bit RGB PNG, base64-encoded. Masks travel as row-major run
lengths starting with a zero run. Machine-readable JSON Schemas live in
forgeline/backends/schemas/.
"""

from __future__ import annotations

import base64
import binascii
import io
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from PIL import Image, UnidentifiedImageError

from forgeline.annotations.types import ArtifactType, BinaryMask
from forgeline.errors import CodecError, ProtocolError

ROLES = ("analyzer", "generator", "inpainter", "reviser", "captioner", "embedder", "scorer")
ENDPOINT_PATHS = {
    "analyzer": "/analyze",
    "generator": "/generate",
    "inpainter": "/inpaint",
    "reviser": "/revise",
    "captioner": "/caption",
    "embedder": "/embed",
    "scorer": "/score",
}

# label is "fake" exactly when fake_prob passes this threshold
DECISION_THRESHOLD = 0.5


def encode_image_png(image: np.ndarray) -> str:
    arr = np.asarray(image)
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise ProtocolError(f"expected 8-bit RGB array, got dtype={arr.dtype} shape={arr.shape}")
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def decode_image_png(payload: str) -> np.ndarray:
    try:
        raw = base64.b64decode(payload, validate=True)
    except (binascii.Error, ValueError, TypeError) as exc:
        raise ProtocolError(f"malformed base64 image payload: {exc}") from exc
    try:
        with Image.open(io.BytesIO(raw)) as img:
            if img.format != "PNG":
                raise ProtocolError(f"image payload is {img.format}, expected PNG")
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError) as exc:
        raise ProtocolError(f"cannot decode PNG payload: {exc}") from exc


def wire_roundtrip(image: np.ndarray) -> np.ndarray:
    """Encode to base64 PNG and back; the identity on 8-bit RGB rasters."""
    return decode_image_png(encode_image_png(image))


def mask_to_wire(mask: BinaryMask) -> dict:
    return mask.to_rle()


def mask_from_wire(payload: dict, width: int, height: int) -> BinaryMask:
    """Decode a wire mask; RLE preferred, inline PNG (0/255) also accepted."""
    if not isinstance(payload, dict):
        raise ProtocolError(f"mask payload must be an object, got {type(payload).__name__}")
    if "png_base64" in payload:
        arr = decode_image_png_gray(payload["png_base64"])
        mask = BinaryMask((arr >= 128).astype(np.uint8))
    else:
        try:
            mask = BinaryMask.from_rle(payload)
        except CodecError as exc:
            raise ProtocolError(str(exc)) from exc
    if mask.width != width or mask.height != height:
        raise ProtocolError(
            f"mask is {mask.width}x{mask.height}, image is {width}x{height}"
        )
    return mask


def decode_image_png_gray(payload: str) -> np.ndarray:
    try:
        raw = base64.b64decode(payload, validate=True)
        with Image.open(io.BytesIO(raw)) as img:
            return np.asarray(img.convert("L"))
    except (binascii.Error, ValueError, OSError, UnidentifiedImageError) as exc:
        raise ProtocolError(f"cannot decode mask PNG: {exc}") from exc


@dataclass
class ReportRegion:
    location: str
    mask: BinaryMask
    explanation: str
    artifact_type: ArtifactType | None = None

    def to_wire(self) -> dict:
        out = {
            "location": self.location,
            "mask": mask_to_wire(self.mask),
            "explanation": self.explanation,
        }
        if self.artifact_type is not None:
            out["artifact_type"] = self.artifact_type.value
        return out


@dataclass
class AnalyzerReport:
    label: str
    fake_prob: float
    explanation: str
    regions: list[ReportRegion] = field(default_factory=list)

    def __post_init__(self):
        if self.label not in ("real", "fake"):
            raise ProtocolError(f"unknown report label: {self.label!r}")
        if not 0.0 <= self.fake_prob <= 1.0:
            raise ProtocolError(f"fake_prob out of range: {self.fake_prob}")
        expected = "fake" if self.fake_prob >= DECISION_THRESHOLD else "real"
        if self.label != expected:
            raise ProtocolError(
                f"label {self.label!r} inconsistent with fake_prob {self.fake_prob} "
                f"at threshold {DECISION_THRESHOLD}"
            )

    def to_wire(self) -> dict:
        return {
            "label": self.label,
            "fake_prob": self.fake_prob,
            "explanation": self.explanation,
            "regions": [r.to_wire() for r in self.regions],
        }

    @classmethod
    def from_wire(cls, payload: dict, width: int, height: int) -> "AnalyzerReport":
        if not isinstance(payload, dict):
            raise ProtocolError("analyzer response must be a JSON object")
        try:
            regions = [
                ReportRegion(
                    location=str(r.get("location", "")),
                    mask=mask_from_wire(r["mask"], width, height),
                    explanation=str(r.get("explanation", "")),
                    artifact_type=(
                        ArtifactType(r["artifact_type"]) if r.get("artifact_type") else None
                    ),
                )
                for r in payload.get("regions", [])
            ]
            return cls(
                label=payload["label"],
                fake_prob=float(payload["fake_prob"]),
                explanation=str(payload.get("explanation", "")),
                regions=regions,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed analyzer report: {exc}") from exc


def report_label(fake_prob: float) -> str:
    return "fake" if fake_prob >= DECISION_THRESHOLD else "real"


def load_schema(name: str) -> dict:
    """Load a shipped JSON schema by file stem, e.g. "embed_response"."""
    path = resources.files("forgeline.backends") / "schemas" / f"{name}.json"
    return json.loads(path.read_text(encoding="utf-8"))
