"""HTTP sentence-embedding sidecar for the forgeline backend protocol.

The service exposes exactly two endpoints — ``POST /embed`` and
``GET /health`` — and validates traffic against the same JSON Schema
files the forgeline package ships, so any client that works against the
built-in mocks works against this process unchanged.
"""

from embedsidecar.app import DEFAULT_MAX_TEXT_LENGTH, create_app
from embedsidecar.models import (
    DEFAULT_MODEL_ID,
    HashModel,
    SentenceTransformerModel,
    SidecarStartupError,
    create_model,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MAX_TEXT_LENGTH",
    "DEFAULT_MODEL_ID",
    "HashModel",
    "SentenceTransformerModel",
    "SidecarStartupError",
    "create_app",
    "create_model",
    "__version__",
]
