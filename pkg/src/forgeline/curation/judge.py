"""Judge filtering: label candidate images through a judge backend.

The judge is any captioner-protocol backend given the packaged curation
prompt; its response must be exactly one of the four canonical labels.
Unparseable responses mark the image failed (never kept) and are logged
verbatim; transport failures propagate, since a reachable judge is a
precondition.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Mapping

import numpy as np

from forgeline.errors import ValidationError

DEFAULT_MAX_INFLIGHT = 4


class JudgeLabel(Enum):
    acceptable = "Acceptable"
    rejected_clarity = "Rejected[Clarity]"
    rejected_safety = "Rejected[Safety]"
    rejected_realism = "Rejected[Realism]"


_CANONICAL = {label.value: label for label in JudgeLabel}


def parse_judge_label(text: str) -> JudgeLabel:
    """Strictly parse one canonical label (surrounding whitespace ignored)."""
    try:
        return _CANONICAL[text.strip()]
    except (KeyError, AttributeError):
        raise ValidationError(f"unparseable judge response: {text!r}") from None


def load_curation_prompt() -> str:
    path = resources.files("forgeline.curation") / "assets" / "curation_prompt.txt"
    return path.read_text(encoding="utf-8")


def load_artifact_prior() -> str:
    path = resources.files("forgeline.curation") / "assets" / "artifact_prior.txt"
    return path.read_text(encoding="utf-8")


@dataclass
class JudgeDecision:
    image_id: str
    raw_response: str
    label: JudgeLabel | None = None
    error: str | None = None

    @property
    def kept(self) -> bool:
        return self.label is JudgeLabel.acceptable

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "raw_response": self.raw_response,
            "label": self.label.value if self.label else None,
            "error": self.error,
        }


@dataclass
class FilterResult:
    decisions: list[JudgeDecision] = field(default_factory=list)

    @property
    def kept(self) -> list[str]:
        return [d.image_id for d in self.decisions if d.kept]

    def labels(self) -> dict[str, str | None]:
        return {d.image_id: (d.label.value if d.label else None) for d in self.decisions}

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kept": self.kept,
            "decisions": [d.to_dict() for d in self.decisions],
        }


def judge_filter(
    images: Mapping[str, np.ndarray],
    judge,
    prompt: str | None = None,
    max_inflight: int = DEFAULT_MAX_INFLIGHT,
) -> FilterResult:
    """Label every image and keep the Acceptable ones.

    Judge calls run concurrently up to ``max_inflight``; decisions are
    returned in sorted id order regardless of completion order.
    """
    if prompt is None:
        prompt = load_curation_prompt()
    ids = sorted(images)
    if not ids:
        return FilterResult()

    def ask(image_id: str) -> str:
        return judge.caption(images[image_id], prompt=prompt)

    with ThreadPoolExecutor(max_workers=max(1, max_inflight)) as pool:
        responses = list(pool.map(ask, ids))

    result = FilterResult()
    for image_id, raw in zip(ids, responses):
        decision = JudgeDecision(image_id=image_id, raw_response=raw)
        try:
            decision.label = parse_judge_label(raw)
        except ValidationError as exc:
            decision.error = str(exc)
        result.decisions.append(decision)
    return result
