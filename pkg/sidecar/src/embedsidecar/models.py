"""Embedding models the sidecar can serve.

Two families are available through :func:`create_model`:

* ``"hash"`` (or ``"hash:<dim>"``) — a dependency-free deterministic
  embedding for offline runs and CI: each token is mapped to a fixed
  pseudo-random direction derived from its SHA-256 digest, token vectors
  are averaged, and the result is L2-normalized.
* any other id — treated as a sentence-transformers model name. The
  model is loaded eagerly so a bad id or missing weights surfaces at
  startup instead of on the first request.

Every model exposes ``embed(text) -> np.ndarray`` (1-D float64, length
``dim``), plus ``dim`` and ``model_id`` attributes. Embeddings must be
reproducible within one process: same text, same vector.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

DEFAULT_MODEL_ID = "sentence-transformers/paraphrase-MiniLM-L6-v2"
DEFAULT_HASH_DIM = 32

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class SidecarStartupError(Exception):
    """The requested embedding model cannot be brought up."""


class HashModel:
    """Deterministic offline embedding built from per-token hash directions."""

    def __init__(self, dim: int = DEFAULT_HASH_DIM):
        if dim < 1:
            raise SidecarStartupError(f"hash model dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.model_id = f"hash:{self.dim}"

    def _token_direction(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "big")
        rng = np.random.default_rng(seed)
        return rng.standard_normal(self.dim)

    def embed(self, text: str) -> np.ndarray:
        tokens = [t.lower() for t in _TOKEN_RE.findall(text)]
        if not tokens:
            vector = np.zeros(self.dim, dtype=np.float64)
            vector[0] = 1.0
            return vector
        acc = np.zeros(self.dim, dtype=np.float64)
        for token in tokens:
            acc += self._token_direction(token)
        acc /= len(tokens)
        norm = float(np.linalg.norm(acc))
        if norm == 0.0:
            vector = np.zeros(self.dim, dtype=np.float64)
            vector[0] = 1.0
            return vector
        return acc / norm


class SentenceTransformerModel:
    """Sentence-transformers model loaded at construction time."""

    def __init__(self, model_id: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise SidecarStartupError(
                "sentence-transformers is not installed; install the 'real' "
                "extra or use the built-in 'hash' model"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise SidecarStartupError(
                f"could not load embedding model {model_id!r}: {exc}"
            ) from exc
        self.model_id = model_id
        dim = self._model.get_sentence_embedding_dimension()
        if not dim:
            dim = int(self.embed("dimension probe").shape[0])
        self.dim = int(dim)

    def embed(self, text: str) -> np.ndarray:
        vector = self._model.encode(text, convert_to_numpy=True, show_progress_bar=False)
        return np.asarray(vector, dtype=np.float64).reshape(-1)


def create_model(spec: str) -> HashModel | SentenceTransformerModel:
    """Build a model from a CLI-style spec string.

    ``"hash"`` and ``"hash:<dim>"`` select the offline hash model; any
    other value is passed to sentence-transformers verbatim. Failures
    raise :class:`SidecarStartupError` so callers can refuse to start.
    """
    if spec == "hash":
        return HashModel()
    if spec.startswith("hash:"):
        try:
            dim = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise SidecarStartupError(f"bad hash model spec {spec!r}") from exc
        return HashModel(dim)
    return SentenceTransformerModel(spec)
