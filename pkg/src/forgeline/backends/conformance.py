"""Protocol conformance probes.

Sends each configured backend one canonical request and checks the
response honors the role's contract (shape round-trips, report parses,
embeddings are finite/deterministic, scores in range). Ground-truth
backed mocks that need a known image_id are probed only when a sample
(image, image_id) pair is supplied; otherwise they report ready without
a deep call.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from forgeline.annotations.types import BinaryMask
from forgeline.backends.suite import BackendSuite
from forgeline.errors import ForgelineError

PROBE_PROMPT = "conformance probe"
PROBE_SIZE = 8


@dataclass
class ProbeResult:
    role: str
    target: str
    ok: bool
    detail: str
    elapsed_ms: float

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "target": self.target,
            "ok": self.ok,
            "detail": self.detail,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _probe_image() -> np.ndarray:
    rows, cols = np.indices((PROBE_SIZE, PROBE_SIZE), dtype=np.uint8)
    return np.stack([rows * 16, cols * 16, np.full_like(rows, 64)], axis=-1)


def _deep_probe(role: str, backend, image: np.ndarray, image_id: str | None) -> str:
    if role == "analyzer":
        report = backend.analyze(image, image_id=image_id)
        return f"label={report.label} regions={len(report.regions)}"
    if role == "generator":
        out = backend.generate(PROBE_PROMPT, PROBE_SIZE, PROBE_SIZE)
        if out.shape != (PROBE_SIZE, PROBE_SIZE, 3):
            raise ForgelineError(f"generator returned shape {out.shape}")
        return "image ok"
    if role == "inpainter":
        height, width = image.shape[:2]
        bits = np.zeros((height, width), dtype=np.uint8)
        bits[: max(1, height // 4), : max(1, width // 4)] = 1
        out = backend.inpaint(image, BinaryMask(bits), PROBE_PROMPT, image_id=image_id)
        if out.shape != image.shape:
            raise ForgelineError(f"inpainter changed shape to {out.shape}")
        return "image ok"
    if role == "reviser":
        revised = backend.revise(PROBE_PROMPT, ["probe feedback"])
        if not isinstance(revised, str):
            raise ForgelineError(f"reviser returned {type(revised).__name__}")
        return "prompt ok"
    if role == "captioner":
        text = backend.caption(image)
        if not isinstance(text, str):
            raise ForgelineError(f"captioner returned {type(text).__name__}")
        return f"caption {len(text)} chars"
    if role == "embedder":
        first = np.asarray(backend.embed(PROBE_PROMPT), dtype=np.float64)
        second = np.asarray(backend.embed(PROBE_PROMPT), dtype=np.float64)
        if first.ndim != 1 or first.size < 1:
            raise ForgelineError(f"embedding has shape {first.shape}")
        if not np.all(np.isfinite(first)):
            raise ForgelineError("embedding contains non-finite values")
        if first.shape != second.shape or not np.allclose(first, second, atol=1e-6):
            raise ForgelineError("embedder is not deterministic for repeated text")
        return f"dim={first.size}"
    if role == "scorer":
        score = float(backend.score(image, image_id=image_id))
        if not 0.0 <= score <= 100.0:
            raise ForgelineError(f"score {score} outside [0, 100]")
        return f"score={score:.2f}"
    raise ForgelineError(f"no probe for role {role!r}")


def probe_suite(
    suite: BackendSuite,
    sample: tuple[np.ndarray, str] | None = None,
    deep: bool = True,
) -> list[ProbeResult]:
    """Probe every configured role; never raises, failures land in results."""
    targets = suite.describe()
    image, image_id = (sample if sample is not None else (_probe_image(), None))
    results = []
    for role in suite.roles():
        backend = suite.get(role)
        start = time.perf_counter()
        try:
            if hasattr(backend, "health"):
                backend.health()
            if not deep:
                detail, ok = "reachable", True
            elif getattr(backend, "needs_image_id", False) and image_id is None:
                detail, ok = "ready (deep probe needs a known image_id)", True
            else:
                detail, ok = _deep_probe(role, backend, image, image_id), True
        except ForgelineError as exc:
            detail, ok = f"{type(exc).__name__}: {exc}", False
        except Exception as exc:  # noqa: BLE001 - a probe must never crash the report
            detail, ok = f"unexpected {type(exc).__name__}: {exc}", False
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        results.append(ProbeResult(role, targets[role], ok, detail, elapsed_ms))
    return results
