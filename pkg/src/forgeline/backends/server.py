"""Serve a BackendSuite over HTTP.

Exposes each configured role at its protocol path plus GET /health; used
to run the deterministic mocks as real network endpoints for integration
tests, demos, and cross-process runs. Request bodies are validated
against the shipped JSON Schemas before dispatch; schema violations and
backend protocol errors return 400 with ``{"error": ...}``, unconfigured
roles 404, unexpected failures 500.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import jsonschema

from forgeline.backends.protocol import (
    ENDPOINT_PATHS,
    decode_image_png,
    encode_image_png,
    load_schema,
    mask_from_wire,
)
from forgeline.backends.suite import BackendSuite
from forgeline.errors import CodecError, ConfigError, ProtocolError, ValidationError

_PATH_TO_ROLE = {path: role for role, path in ENDPOINT_PATHS.items()}


def _dispatch(role: str, backend, payload: dict) -> dict:
    if role == "analyzer":
        image = decode_image_png(payload["image"])
        report = backend.analyze(image, image_id=payload.get("image_id"))
        return report.to_wire()
    if role == "generator":
        image = backend.generate(
            payload["prompt"],
            int(payload["width"]),
            int(payload["height"]),
            image_id=payload.get("image_id"),
        )
        return {"image": encode_image_png(image)}
    if role == "inpainter":
        image = decode_image_png(payload["image"])
        height, width = image.shape[:2]
        mask = mask_from_wire(payload["mask"], width, height)
        out = backend.inpaint(
            image,
            mask,
            payload["explanation"],
            location=payload.get("location"),
            image_id=payload.get("image_id"),
        )
        return {"image": encode_image_png(out)}
    if role == "reviser":
        return {"prompt": backend.revise(payload["prompt"], list(payload["memory"]))}
    if role == "captioner":
        image = decode_image_png(payload["image"])
        return {"text": backend.caption(image, prompt=payload.get("prompt"))}
    if role == "embedder":
        if "image" in payload:
            if not hasattr(backend, "embed_image"):
                raise ProtocolError("this embedder accepts text only, not images")
            vector = backend.embed_image(decode_image_png(payload["image"]))
        else:
            vector = backend.embed(payload["text"])
        out = {"vector": [float(v) for v in vector], "dim": int(len(vector))}
        model_id = getattr(backend, "model_id", None)
        if model_id:
            out["model_id"] = model_id
        return out
    if role == "scorer":
        score = backend.score(
            decode_image_png(payload["image"]), image_id=payload.get("image_id")
        )
        return {"score": float(score)}
    raise ConfigError(f"no dispatcher for role {role!r}")


class _SuiteHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, handler, suite: BackendSuite):
        super().__init__(address, handler)
        self.suite = suite
        self.request_schemas = {
            role: load_schema(path.strip("/") + "_request")
            for role, path in ENDPOINT_PATHS.items()
        }


class _Handler(BaseHTTPRequestHandler):
    server: _SuiteHTTPServer
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path != "/health":
            self._send_json(404, {"error": f"unknown path {self.path!r}"})
            return
        suite = self.server.suite
        health: dict = {"status": "ok", "roles": list(suite.roles())}
        if "embedder" in suite:
            embedder = suite.get("embedder")
            dim = getattr(embedder, "dim", None)
            if dim:
                health["dim"] = int(dim)
            model_id = getattr(embedder, "model_id", None)
            if model_id:
                health["model_id"] = model_id
        self._send_json(200, health)

    def do_POST(self):
        role = _PATH_TO_ROLE.get(self.path)
        if role is None:
            self._send_json(404, {"error": f"unknown path {self.path!r}"})
            return
        if role not in self.server.suite:
            self._send_json(404, {"error": f"role {role!r} is not served here"})
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length).decode("utf-8"))
            jsonschema.validate(payload, self.server.request_schemas[role])
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_json(400, {"error": f"request body is not valid JSON: {exc}"})
            return
        except jsonschema.ValidationError as exc:
            self._send_json(400, {"error": f"request violates {role} schema: {exc.message}"})
            return
        try:
            result = _dispatch(role, self.server.suite.get(role), payload)
        except (ProtocolError, ValidationError, CodecError) as exc:
            self._send_json(400, {"error": str(exc)})
            return
        except Exception as exc:  # noqa: BLE001 - report, do not kill the server
            self._send_json(500, {"error": f"{type(exc).__name__}: {exc}"})
            return
        self._send_json(200, result)


class MockBackendServer:
    """Run a BackendSuite behind a local HTTP listener (context manager)."""

    def __init__(self, suite: BackendSuite, host: str = "127.0.0.1", port: int = 0):
        self._httpd = _SuiteHTTPServer((host, port), _Handler, suite)
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockBackendServer":
        if self._thread is None:
            self._thread = threading.Thread(
                target=self._httpd.serve_forever, name="mock-backends", daemon=True
            )
            self._thread.start()
        return self

    def stop(self) -> None:
        if self._thread is not None:
            self._httpd.shutdown()
            self._thread.join(timeout=5)
            self._thread = None
        self._httpd.server_close()

    def __enter__(self) -> "MockBackendServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()
