"""HTTP clients for model-backend endpoints.

One small client class per role. All share the same transport policy:

* POST JSON to the role's path under the configured base URL.
* Connection errors, timeouts, and 5xx responses are retried with
  exponential backoff (``backoff_base * 2**k`` seconds between attempts)
  and surface as :class:`~forgeline.errors.TransportError` once the retry
  budget is spent.
* 4xx responses, non-JSON bodies, and schema violations are not retried
  and surface as :class:`~forgeline.errors.ProtocolError`.
* At most ``max_inflight`` requests per client are in flight at once.
"""

from __future__ import annotations

import threading
import time

import jsonschema
import numpy as np
import requests

from forgeline.annotations.types import BinaryMask
from forgeline.backends import protocol
from forgeline.backends.protocol import (
    ENDPOINT_PATHS,
    AnalyzerReport,
    decode_image_png,
    encode_image_png,
    load_schema,
    mask_to_wire,
)
from forgeline.errors import ProtocolError, TransportError

DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRIES = 3
DEFAULT_BACKOFF_BASE = 0.5
DEFAULT_MAX_INFLIGHT = 4


class _HttpCaller:
    """Shared POST/retry/validate plumbing for one endpoint."""

    role: str = ""

    def __init__(
        self,
        base_url: str,
        *,
        timeout: float = DEFAULT_TIMEOUT,
        retries: int = DEFAULT_RETRIES,
        backoff_base: float = DEFAULT_BACKOFF_BASE,
        max_inflight: int = DEFAULT_MAX_INFLIGHT,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.url = self.base_url + ENDPOINT_PATHS[self.role]
        self.timeout = timeout
        self.retries = int(retries)
        self.backoff_base = backoff_base
        self._sem = threading.BoundedSemaphore(max(1, int(max_inflight)))
        self._session = session or requests.Session()
        self._request_schema = load_schema(ENDPOINT_PATHS[self.role].strip("/") + "_request")
        self._response_schema = load_schema(ENDPOINT_PATHS[self.role].strip("/") + "_response")

    def describe(self) -> str:
        return self.url

    def _post(self, payload: dict) -> dict:
        last_error: TransportError | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                with self._sem:
                    resp = self._session.post(self.url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = TransportError(f"request failed: {exc}", endpoint=self.url)
                continue
            if resp.status_code >= 500:
                last_error = TransportError(
                    f"server error HTTP {resp.status_code}: {resp.text[:200]}",
                    endpoint=self.url,
                )
                continue
            if resp.status_code != 200:
                raise ProtocolError(
                    f"HTTP {resp.status_code}: {resp.text[:200]}", endpoint=self.url
                )
            try:
                data = resp.json()
            except ValueError as exc:
                raise ProtocolError(f"response is not JSON: {exc}", endpoint=self.url) from exc
            try:
                jsonschema.validate(data, self._response_schema)
            except jsonschema.ValidationError as exc:
                raise ProtocolError(
                    f"response violates {self.role} schema: {exc.message}", endpoint=self.url
                ) from exc
            return data
        assert last_error is not None
        raise last_error

    def health(self) -> dict:
        """GET /health on the base URL; transport failures raise TransportError."""
        url = self.base_url + "/health"
        try:
            resp = self._session.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"health check failed: {exc}", endpoint=url) from exc
        if resp.status_code != 200:
            raise TransportError(f"health check HTTP {resp.status_code}", endpoint=url)
        try:
            data = resp.json()
        except ValueError as exc:
            raise ProtocolError(f"health response is not JSON: {exc}", endpoint=url) from exc
        try:
            jsonschema.validate(data, load_schema("health_response"))
        except jsonschema.ValidationError as exc:
            raise ProtocolError(
                f"health response violates schema: {exc.message}", endpoint=url
            ) from exc
        return data


class HttpAnalyzer(_HttpCaller):
    role = "analyzer"

    def analyze(self, image: np.ndarray, image_id: str | None = None) -> AnalyzerReport:
        height, width = np.asarray(image).shape[:2]
        payload: dict = {"image": encode_image_png(image)}
        if image_id is not None:
            payload["image_id"] = image_id
        return AnalyzerReport.from_wire(self._post(payload), width, height)


class HttpGenerator(_HttpCaller):
    role = "generator"

    def generate(
        self, prompt: str, width: int, height: int, image_id: str | None = None
    ) -> np.ndarray:
        payload: dict = {"prompt": prompt, "width": int(width), "height": int(height)}
        if image_id is not None:
            payload["image_id"] = image_id
        image = decode_image_png(self._post(payload)["image"])
        if image.shape[:2] != (height, width):
            raise ProtocolError(
                f"generator returned {image.shape[1]}x{image.shape[0]}, "
                f"requested {width}x{height}",
                endpoint=self.url,
            )
        return image


class HttpInpainter(_HttpCaller):
    role = "inpainter"

    def inpaint(
        self,
        image: np.ndarray,
        mask: BinaryMask,
        explanation: str,
        location: str | None = None,
        image_id: str | None = None,
    ) -> np.ndarray:
        height, width = np.asarray(image).shape[:2]
        if (mask.height, mask.width) != (height, width):
            raise ProtocolError(
                f"mask is {mask.width}x{mask.height}, image is {width}x{height}"
            )
        payload: dict = {
            "image": encode_image_png(image),
            "mask": mask_to_wire(mask),
            "explanation": explanation,
        }
        if location is not None:
            payload["location"] = location
        if image_id is not None:
            payload["image_id"] = image_id
        out = decode_image_png(self._post(payload)["image"])
        if out.shape[:2] != (height, width):
            raise ProtocolError(
                f"inpainter changed image size to {out.shape[1]}x{out.shape[0]}",
                endpoint=self.url,
            )
        return out


class HttpReviser(_HttpCaller):
    role = "reviser"

    def revise(self, prompt: str, memory: list[str]) -> str:
        return self._post({"prompt": prompt, "memory": list(memory)})["prompt"]


class HttpCaptioner(_HttpCaller):
    role = "captioner"

    def caption(self, image: np.ndarray, prompt: str | None = None) -> str:
        payload: dict = {"image": encode_image_png(image)}
        if prompt is not None:
            payload["prompt"] = prompt
        return self._post(payload)["text"]


class HttpEmbedder(_HttpCaller):
    role = "embedder"

    def _vector_from(self, data: dict) -> np.ndarray:
        vector = np.asarray(data["vector"], dtype=np.float64)
        if vector.shape != (int(data["dim"]),):
            raise ProtocolError(
                f"embedder advertised dim {data['dim']} but returned {vector.shape[0]} values",
                endpoint=self.url,
            )
        return vector

    def embed(self, text: str) -> np.ndarray:
        return self._vector_from(self._post({"text": text}))

    def embed_image(self, image: np.ndarray) -> np.ndarray:
        return self._vector_from(self._post({"image": encode_image_png(image)}))


class HttpScorer(_HttpCaller):
    role = "scorer"

    def score(self, image: np.ndarray, image_id: str | None = None) -> float:
        payload: dict = {"image": encode_image_png(image)}
        if image_id is not None:
            payload["image_id"] = image_id
        return float(self._post(payload)["score"])


CLIENT_CLASSES = {
    cls.role: cls
    for cls in (
        HttpAnalyzer,
        HttpGenerator,
        HttpInpainter,
        HttpReviser,
        HttpCaptioner,
        HttpEmbedder,
        HttpScorer,
    )
}

assert set(CLIENT_CLASSES) == set(protocol.ROLES)
