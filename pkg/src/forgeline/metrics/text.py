"""Explanation scoring: ROUGE-L and embedding-cosine similarity (CSS).

Tokenization is Unicode-aware: lowercase, split on whitespace and
punctuation, punctuation dropped. ROUGE-L uses the balanced harmonic F.
CSS clamps negative cosines at zero and scales to 0-100; reports carry the
raw cosine alongside.
"""

from __future__ import annotations

import re

import numpy as np

from forgeline import kernels

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def rouge_l(candidate: str, reference: str) -> float:
    """LCS-based F score scaled to 0-100. Both inputs empty scores 100."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand and not ref:
        return 100.0
    if not cand or not ref:
        return 0.0
    vocab = {}
    a = np.fromiter((vocab.setdefault(t, len(vocab)) for t in cand), dtype=np.int64)
    b = np.fromiter((vocab.setdefault(t, len(vocab)) for t in ref), dtype=np.int64)
    lcs = kernels.lcs_length(a, b)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 100.0 * 2.0 * precision * recall / (precision + recall)


def cosine_sim(a, b) -> float:
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape or va.ndim != 1:
        raise ValueError(f"embedding dimension mismatch: {va.shape} vs {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for a zero vector")
    return float(np.dot(va, vb) / (na * nb))


def css_from_cosine(cos: float) -> float:
    return 100.0 * max(0.0, cos)


def css_score(candidate: str, reference: str, embedder) -> float:
    """Cosine similarity of the two texts' embeddings, clamped to [0, 100].

    ``embedder`` is any object with embed(text) -> vector (a backend client
    or a deterministic mock).
    """
    return css_from_cosine(cosine_sim(embedder.embed(candidate), embedder.embed(reference)))


REGION_RESPONSE_TEMPLATE = "{location}: {explanation} ({artifact_type} artifact)"


def format_region_response(location: str, explanation: str, artifact_type: str = "structure") -> str:
    """Deterministic template fill used to align free-form model output with
    the fixed per-region response format before scoring."""
    return REGION_RESPONSE_TEMPLATE.format(
        location=location.strip(), explanation=explanation.strip(), artifact_type=artifact_type
    )
