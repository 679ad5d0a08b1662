"""HTTP surface of the sidecar: POST /embed and GET /health.

Requests are validated against the embedder JSON Schemas shipped inside
the forgeline package, and every successful response is checked against
the response schema before it leaves the process. Rejected requests get
status 400 with a machine-readable ``{"error": ...}`` body — the same
error convention forgeline's own mock server uses — so clients never
need to parse prose out of an HTML error page.
"""

from __future__ import annotations

import json
import threading
from importlib import resources

import jsonschema
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

DEFAULT_MAX_TEXT_LENGTH = 8192


def _load_schema(name: str) -> dict:
    path = resources.files("forgeline.backends") / "schemas" / f"{name}.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(model, *, max_text_length: int = DEFAULT_MAX_TEXT_LENGTH) -> FastAPI:
    """Wrap an embedding model in a protocol-conformant ASGI app.

    ``model`` needs ``embed(text) -> 1-D array``, ``dim``, and
    ``model_id``. Embedding calls are serialized behind a lock — model
    backends are not assumed thread-safe — while validation and I/O run
    concurrently under the ASGI server.
    """
    if max_text_length < 1:
        raise ValueError(f"max_text_length must be >= 1, got {max_text_length}")
    request_schema = _load_schema("embed_request")
    response_schema = _load_schema("embed_response")
    embed_lock = threading.Lock()

    app = FastAPI(title="embed-sidecar", docs_url=None, redoc_url=None)

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "roles": ["embedder"],
            "dim": int(model.dim),
            "model_id": model.model_id,
        }

    @app.post("/embed")
    async def embed(request: Request) -> JSONResponse:
        try:
            payload = json.loads((await request.body()).decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            return _error(400, f"request body is not valid JSON: {exc}")
        try:
            jsonschema.validate(payload, request_schema)
        except jsonschema.ValidationError as exc:
            return _error(400, f"request violates embedder schema: {exc.message}")
        if "image" in payload:
            return _error(
                400, "this service embeds text only; image embedding is not supported"
            )
        text = payload["text"]
        if len(text) > max_text_length:
            return _error(
                400,
                f"text length {len(text)} exceeds the configured maximum "
                f"of {max_text_length}",
            )
        try:
            with embed_lock:
                vector = model.embed(text)
            body = {
                "vector": [float(v) for v in vector],
                "dim": int(model.dim),
                "model_id": model.model_id,
            }
            jsonschema.validate(body, response_schema)
        except Exception as exc:  # noqa: BLE001 - report, do not kill the server
            return _error(500, f"{type(exc).__name__}: {exc}")
        return JSONResponse(status_code=200, content=body)

    return app
