"""Loading and saving the pixel data referenced by manifest entries."""

from __future__ import annotations

import base64
import binascii
import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from forgeline.annotations.manifest import DatasetManifest
from forgeline.annotations.types import AnnotatedImage
from forgeline.errors import ManifestIOError, ValidationError


def load_entry_image(entry: AnnotatedImage, base_dir: str | Path | None = None) -> np.ndarray:
    """Decode an entry's pixels to an 8-bit RGB array.

    Path references resolve relative to ``base_dir`` (normally the
    manifest's directory) unless absolute.
    """
    ref = entry.image_ref
    if ref.png_base64 is not None:
        try:
            raw = base64.b64decode(ref.png_base64, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise ValidationError(
                f"entry {entry.id!r}: malformed base64 image data: {exc}"
            ) from exc
        source: io.BytesIO | Path = io.BytesIO(raw)
    else:
        path = Path(ref.path)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        source = path
    try:
        with Image.open(source) as img:
            return np.asarray(img.convert("RGB"))
    except FileNotFoundError as exc:
        raise ManifestIOError(f"entry {entry.id!r}: image file not found: {exc}") from exc
    except (UnidentifiedImageError, OSError) as exc:
        raise ValidationError(f"entry {entry.id!r}: cannot decode image: {exc}") from exc


def load_manifest_images(
    manifest: DatasetManifest, base_dir: str | Path | None = None
) -> dict[str, np.ndarray]:
    """Decode every entry's image, keyed by entry id."""
    return {e.id: load_entry_image(e, base_dir) for e in manifest.entries}


def save_image(path: str | Path, image: np.ndarray) -> None:
    """Write an 8-bit RGB array as PNG, creating parent directories."""
    arr = np.asarray(image)
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(
            f"expected an 8-bit RGB image, got dtype={arr.dtype} shape={arr.shape}"
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")
