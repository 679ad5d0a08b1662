"""Run logs for refinement pipelines: JSON records plus saved images.

``run_and_log_regeneration`` / ``run_and_log_inpainting`` wrap the
pipelines so every iteration is persisted as it completes: if a backend
call fails mid-run, the partial log (status "aborted", error recorded)
is already on disk before the exception propagates. Logs validate
against the shipped schemas in forgeline/refine/schemas/.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from PIL import Image

from forgeline.backends.suite import BackendSuite
from forgeline.errors import ForgelineError, ManifestIOError, ValidationError
from forgeline.refine.inpaint import (
    DEFAULT_ITERS,
    InpaintIteration,
    InpaintResult,
    run_inpainting,
)
from forgeline.refine.regen import (
    DEFAULT_MAX_ITERS,
    RegenIteration,
    RegenResult,
    run_regeneration,
)

SCHEMA_VERSION = 1
LOG_FILENAME = "run_log.json"
IMAGES_DIRNAME = "images"


def load_log_schema(kind: str) -> dict:
    path = resources.files("forgeline.refine") / "schemas" / f"{kind}_log.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _sha256_image(image: np.ndarray) -> str:
    arr = np.ascontiguousarray(np.asarray(image, dtype=np.uint8))
    h = hashlib.sha256()
    h.update(repr(arr.shape).encode("ascii"))
    h.update(arr.tobytes())
    return h.hexdigest()


def validate_run_log(payload: dict) -> None:
    """Check a run-log dict against its schema; raises ValidationError."""
    kind = payload.get("kind")
    if kind not in ("regen", "inpaint"):
        raise ValidationError(f"unknown run-log kind: {kind!r}")
    try:
        jsonschema.validate(payload, load_log_schema(kind))
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"run log violates {kind} schema: {exc.message}") from exc


def load_run_log(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ManifestIOError(f"cannot read run log {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"run log {path!r} is not valid JSON: {exc}") from exc
    validate_run_log(payload)
    return payload


class _LogWriter:
    """Incrementally writes the run log; every flush leaves a valid file."""

    def __init__(
        self,
        out_dir: str | Path,
        kind: str,
        suite: BackendSuite,
        config: dict,
        image_id: str | None,
        save_images: bool = True,
    ):
        self.out_dir = Path(out_dir)
        self.kind = kind
        self.save_images = save_images
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if save_images:
            (self.out_dir / IMAGES_DIRNAME).mkdir(exist_ok=True)
        self.payload: dict = {
            "schema_version": SCHEMA_VERSION,
            "kind": kind,
            "status": "aborted",  # flipped to completed on success
            "converged": False,
            "image_id": image_id,
            "backends": suite.describe(),
            "config": config,
            "iterations": [],
            "error": None,
        }
        if kind == "regen":
            self.payload["memory"] = []
        else:
            self.payload["mode"] = config.get("mode", "paper_faithful")

    @property
    def log_path(self) -> Path:
        return self.out_dir / LOG_FILENAME

    def _save_image(self, index: int, image: np.ndarray) -> str | None:
        if not self.save_images:
            return None
        rel = f"{IMAGES_DIRNAME}/iteration_{index:02d}.png"
        Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(
            self.out_dir / rel
        )
        return rel

    def record(self, record: RegenIteration | InpaintIteration) -> None:
        entry: dict = {
            "index": record.index,
            "image_sha256": _sha256_image(record.image),
            "image_file": self._save_image(record.index, record.image),
            "artifact_pixels": record.artifact_pixels,
            "score": record.score,
            "report": record.report.to_wire(),
        }
        if isinstance(record, RegenIteration):
            entry["prompt"] = record.prompt
        else:
            entry["regions_repaired"] = record.regions_repaired
        self.payload["iterations"].append(entry)
        self.flush()

    def finish(self, result: RegenResult | InpaintResult) -> None:
        self.payload["status"] = "completed"
        self.payload["converged"] = result.converged
        if isinstance(result, RegenResult):
            self.payload["memory"] = result.memory
        else:
            # regions_repaired is set after a round's repairs complete;
            # re-sync the already-flushed entries
            for entry, record in zip(self.payload["iterations"], result.iterations):
                entry["regions_repaired"] = record.regions_repaired
        self.flush()

    def fail(self, exc: BaseException) -> None:
        self.payload["status"] = "aborted"
        self.payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
        self.flush()

    def flush(self) -> None:
        validate_run_log(self.payload)
        tmp = self.log_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self.payload, fh, indent=2)
            fh.write("\n")
        tmp.replace(self.log_path)


def run_and_log_regeneration(
    suite: BackendSuite,
    image: np.ndarray,
    prompt: str | None = None,
    *,
    image_id: str | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    out_dir: str | Path,
    save_images: bool = True,
) -> tuple[RegenResult, Path]:
    """Regeneration with persistent logging; partial log survives aborts."""
    config = {"max_iters": max_iters, "prompt_source": "caption" if prompt is None else "given"}
    writer = _LogWriter(out_dir, "regen", suite, config, image_id, save_images)
    try:
        result = run_regeneration(
            suite,
            image,
            prompt,
            image_id=image_id,
            max_iters=max_iters,
            observer=writer.record,
        )
    except ForgelineError as exc:
        writer.fail(exc)
        raise
    writer.finish(result)
    return result, writer.log_path


def run_and_log_inpainting(
    suite: BackendSuite,
    image: np.ndarray,
    *,
    image_id: str | None = None,
    iters: int = DEFAULT_ITERS,
    mode: str = "paper_faithful",
    out_dir: str | Path,
    save_images: bool = True,
) -> tuple[InpaintResult, Path]:
    """Inpainting with persistent logging; partial log survives aborts."""
    config = {"iters": iters, "mode": mode}
    writer = _LogWriter(out_dir, "inpaint", suite, config, image_id, save_images)
    try:
        result = run_inpainting(
            suite,
            image,
            image_id=image_id,
            iters=iters,
            mode=mode,
            observer=writer.record,
        )
    except ForgelineError as exc:
        writer.fail(exc)
        raise
    writer.finish(result)
    return result, writer.log_path
