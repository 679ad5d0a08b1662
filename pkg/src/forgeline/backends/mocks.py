"""Deterministic in-process backends for tests and offline runs.

Every mock is a pure function of its request plus a constructor seed:
identical inputs always produce identical outputs, with no hidden state.
Mocks that consult annotation ground truth (OracleAnalyzer, AreaScorer,
PerfectInpainter) resolve images through the ``image_id`` request field.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from forgeline.annotations.manifest import DatasetManifest
from forgeline.annotations.raster import rasterize_region
from forgeline.annotations.types import AnnotatedImage, ArtifactRegion, BinaryMask
from forgeline.backends.protocol import AnalyzerReport, ReportRegion, report_label
from forgeline.errors import ConfigError, ProtocolError
from forgeline.metrics.text import tokenize

DEFAULT_CAPTION = "a photograph of a scene."
DEFAULT_EMBED_DIM = 32
DEFAULT_FILL = (128, 128, 128)

# (role, kind) pairs that read annotation ground truth and so cannot be
# built without a manifest
TRUTH_BACKED_KINDS = {
    ("analyzer", "oracle"),
    ("inpainter", "perfect"),
    ("scorer", "area"),
}


def image_digest(image: np.ndarray) -> str:
    """Stable content address for an 8-bit image: sha256 over dims + pixels."""
    arr = np.ascontiguousarray(np.asarray(image, dtype=np.uint8))
    h = hashlib.sha256()
    h.update(repr(arr.shape).encode("ascii"))
    h.update(arr.tobytes())
    return h.hexdigest()


def _derived_rng(seed: int, *parts: str) -> np.random.Generator:
    """RNG keyed on (seed, *parts) so draws depend only on request content."""
    digest = hashlib.blake2b(
        "|".join([str(seed), *parts]).encode("utf-8"), digest_size=8
    ).digest()
    return np.random.default_rng(np.random.SeedSequence(int.from_bytes(digest, "big")))


class _GroundTruth:
    """Shared lookup of annotated entries and optional clean references."""

    def __init__(
        self,
        manifest: DatasetManifest,
        references: dict[str, np.ndarray] | None = None,
    ):
        self.entries: dict[str, AnnotatedImage] = {e.id: e for e in manifest.entries}
        self.references = dict(references or {})
        unknown = set(self.references) - set(self.entries)
        if unknown:
            raise ConfigError(f"references for unknown image ids: {sorted(unknown)}")

    def entry(self, image_id: str | None) -> AnnotatedImage:
        if image_id is None:
            raise ProtocolError("this backend requires an image_id in the request")
        try:
            return self.entries[image_id]
        except KeyError:
            raise ProtocolError(f"unknown image_id: {image_id!r}") from None

    def region_masks(
        self, image: np.ndarray, image_id: str
    ) -> list[tuple[ArtifactRegion, BinaryMask]]:
        """Rasterize each annotated region, restricted to pixels that still
        differ from the registered clean reference (when one exists)."""
        entry = self.entry(image_id)
        height, width = np.asarray(image).shape[:2]
        reference = self.references.get(image_id)
        diff = None
        if reference is not None:
            if reference.shape != np.asarray(image).shape:
                raise ProtocolError(
                    f"image shape {np.asarray(image).shape} does not match "
                    f"reference {reference.shape} for {image_id!r}"
                )
            diff = np.any(np.asarray(image) != reference, axis=-1)
        out = []
        for region in entry.regions:
            mask = rasterize_region(region, width, height)
            if diff is not None:
                mask = BinaryMask((mask.bits.astype(bool) & diff).astype(np.uint8))
            if mask.area == 0:
                continue
            out.append((region, mask))
        return out


class OracleAnalyzer:
    """Reports the annotated ground-truth regions for a known image_id.

    With a registered clean reference, each region mask is trimmed to the
    pixels that still differ from that reference, so repaired regions
    disappear from subsequent reports. Optional degradation knobs:
    ``perturb_radius`` dilates every mask, ``drop_prob`` omits each region
    with that probability (decided by a request-content-derived RNG, so
    repeated identical calls agree).
    """

    kind = "oracle"
    needs_image_id = True

    def __init__(self, truth: _GroundTruth, perturb_radius: int = 0,
                 drop_prob: float = 0.0, seed: int = 0):
        if perturb_radius < 0:
            raise ConfigError(f"perturb_radius must be >= 0, got {perturb_radius}")
        if not 0.0 <= drop_prob <= 1.0:
            raise ConfigError(f"drop_prob must be in [0, 1], got {drop_prob}")
        self.truth = truth
        self.perturb_radius = int(perturb_radius)
        self.drop_prob = float(drop_prob)
        self.seed = int(seed)

    def analyze(self, image: np.ndarray, image_id: str | None = None) -> AnalyzerReport:
        pairs = self.truth.region_masks(image, image_id)
        rng = _derived_rng(self.seed, "analyze", image_id or "", image_digest(image))
        regions = []
        for index, (region, mask) in enumerate(pairs):
            if self.drop_prob > 0.0 and rng.random() < self.drop_prob:
                continue
            if self.perturb_radius > 0:
                dilated = ndimage.binary_dilation(
                    mask.bits.astype(bool), iterations=self.perturb_radius
                )
                mask = BinaryMask(dilated.astype(np.uint8))
            regions.append(
                ReportRegion(
                    location=region.location,
                    mask=mask,
                    explanation=region.explanation,
                    artifact_type=region.artifact_type,
                )
            )
        fake_prob = 0.98 if regions else 0.02
        explanation = (
            f"{len(regions)} artifact region(s) detected."
            if regions
            else "No artifacts detected."
        )
        return AnalyzerReport(
            label=report_label(fake_prob),
            fake_prob=fake_prob,
            explanation=explanation,
            regions=regions,
        )


class ScriptedAnalyzer:
    """Returns canned reports keyed by image content digest.

    Pure by construction: the report for an image depends only on its
    pixels. Unknown images raise unless a ``default`` report is supplied.
    """

    kind = "scripted"

    def __init__(self, script: dict[str, AnalyzerReport],
                 default: AnalyzerReport | None = None):
        self.script = dict(script)
        self.default = default

    def analyze(self, image: np.ndarray, image_id: str | None = None) -> AnalyzerReport:
        digest = image_digest(image)
        report = self.script.get(digest, self.default)
        if report is None:
            raise ProtocolError(f"no scripted report for image digest {digest[:12]}...")
        return report


class PromptHashGenerator:
    """Emits an image whose pixels are a pure hash of (seed, prompt, size)."""

    kind = "prompt_hash"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)

    def generate(self, prompt: str, width: int, height: int,
                 image_id: str | None = None) -> np.ndarray:
        if width < 1 or height < 1:
            raise ProtocolError(f"invalid image size {width}x{height}")
        rng = _derived_rng(self.seed, "generate", f"{width}x{height}", prompt)
        return rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)


class IdentityInpainter:
    """Returns the input image unchanged (a no-op repair)."""

    kind = "identity"

    def inpaint(self, image: np.ndarray, mask: BinaryMask, explanation: str,
                location: str | None = None, image_id: str | None = None) -> np.ndarray:
        return np.asarray(image).copy()


class ConstantFillInpainter:
    """Paints every masked pixel with a fixed RGB color."""

    kind = "constant"

    def __init__(self, fill: tuple[int, int, int] = DEFAULT_FILL):
        fill = tuple(int(c) for c in fill)
        if len(fill) != 3 or any(not 0 <= c <= 255 for c in fill):
            raise ConfigError(f"fill must be three bytes, got {fill!r}")
        self.fill = fill

    def inpaint(self, image: np.ndarray, mask: BinaryMask, explanation: str,
                location: str | None = None, image_id: str | None = None) -> np.ndarray:
        out = np.asarray(image).copy()
        out[mask.bits.astype(bool)] = self.fill
        return out


class PerfectInpainter:
    """Restores masked pixels from the registered clean reference image."""

    kind = "perfect"
    needs_image_id = True

    def __init__(self, truth: _GroundTruth):
        if not truth.references:
            raise ConfigError(
                "perfect inpainter requires clean reference images, none registered"
            )
        self.truth = truth

    def inpaint(self, image: np.ndarray, mask: BinaryMask, explanation: str,
                location: str | None = None, image_id: str | None = None) -> np.ndarray:
        self.truth.entry(image_id)  # validates the id
        reference = self.truth.references.get(image_id)
        if reference is None:
            raise ProtocolError(f"no clean reference registered for {image_id!r}")
        arr = np.asarray(image)
        if reference.shape != arr.shape:
            raise ProtocolError(
                f"image shape {arr.shape} does not match reference {reference.shape}"
            )
        out = arr.copy()
        selected = mask.bits.astype(bool)
        out[selected] = reference[selected]
        return out


class EchoReviser:
    """Appends the accumulated feedback to the prompt as an avoid-list."""

    kind = "echo"

    def revise(self, prompt: str, memory: list[str]) -> str:
        if not memory:
            return prompt
        return prompt + " Avoid: " + "; ".join(memory)


class ConstantCaptioner:
    """Describes every image with the same fixed caption."""

    kind = "constant"

    def __init__(self, text: str = DEFAULT_CAPTION):
        self.text = text

    def caption(self, image: np.ndarray, prompt: str | None = None) -> str:
        return self.text


class HashEmbedder:
    """Feature-hashing sentence embedder; deterministic and train-free.

    Each lowercase token is hashed (blake2b, 8 bytes); the hash picks a
    bucket (``h % dim``) and a sign (top bit), signs are accumulated per
    bucket, and the result is L2-normalized. Texts with no tokens (or a
    zero accumulation) map to the first basis vector. Identical texts give
    cosine similarity 1; disjoint token sets are nearly orthogonal.
    """

    kind = "hash"

    def __init__(self, dim: int = DEFAULT_EMBED_DIM):
        if dim < 1:
            raise ConfigError(f"embedding dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.model_id = f"feature-hash-{self.dim}"

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in tokenize(text):
            h = int.from_bytes(
                hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big"
            )
            sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
            vec[h % self.dim] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            vec[0] = 1.0
            return vec
        return vec / norm

    def embed_image(self, image: np.ndarray) -> np.ndarray:
        """Image feature variant: bilinear-downsample to a 4x4 RGB thumbnail,
        flatten, tile or truncate to ``dim``, and L2-normalize. Deterministic,
        and nearby images map to nearby features so clustering is meaningful.
        An all-black image maps to the first basis vector."""
        arr = np.asarray(image, dtype=np.uint8)
        thumb = Image.fromarray(arr, mode="RGB").resize((4, 4), Image.BILINEAR)
        feat = np.asarray(thumb, dtype=np.float64).reshape(-1)
        reps = -(-self.dim // feat.size)  # ceil division
        vec = np.tile(feat, reps)[: self.dim]
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            out = np.zeros(self.dim, dtype=np.float64)
            out[0] = 1.0
            return out
        return vec / norm


class AreaScorer:
    """Scores 100 * (1 - fraction of pixels inside ground-truth artifact
    regions), using the same reference-trimmed masks as OracleAnalyzer:
    a fully repaired image scores 100."""

    kind = "area"
    needs_image_id = True

    def __init__(self, truth: _GroundTruth):
        self.truth = truth

    def score(self, image: np.ndarray, image_id: str | None = None) -> float:
        pairs = self.truth.region_masks(image, image_id)
        height, width = np.asarray(image).shape[:2]
        if not pairs:
            return 100.0
        union = np.zeros((height, width), dtype=bool)
        for _, mask in pairs:
            union |= mask.bits.astype(bool)
        return 100.0 * (1.0 - union.sum() / union.size)


class ConstantScorer:
    """Returns the same score for every image."""

    kind = "constant"

    def __init__(self, value: float = 50.0):
        if not 0.0 <= value <= 100.0:
            raise ConfigError(f"score must be in [0, 100], got {value}")
        self.value = float(value)

    def score(self, image: np.ndarray, image_id: str | None = None) -> float:
        return self.value


@dataclass
class MockSuiteConfig:
    """Knobs for :func:`build_mock_suite`; JSON-friendly via from_dict."""

    seed: int = 0
    analyzer: str = "oracle"
    generator: str = "prompt_hash"
    inpainter: str = "identity"
    reviser: str = "echo"
    captioner: str = "constant"
    embedder: str = "hash"
    scorer: str = "area"
    perturb_radius: int = 0
    drop_prob: float = 0.0
    fill: tuple[int, int, int] = DEFAULT_FILL
    constant_score: float = 50.0
    caption: str = DEFAULT_CAPTION
    embed_dim: int = DEFAULT_EMBED_DIM
    # directory of <image_id>.png clean references for the ground-truth mocks
    references_dir: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "MockSuiteConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown mock option(s): {sorted(unknown)}")
        kwargs = dict(data)
        if "fill" in kwargs:
            kwargs["fill"] = tuple(kwargs["fill"])
        return cls(**kwargs)


def make_mock(
    role: str,
    kind: str,
    config: MockSuiteConfig,
    truth: _GroundTruth | None = None,
):
    """Construct one mock backend; raises ConfigError for unknown kinds or
    missing ground truth."""

    def need_truth() -> _GroundTruth:
        if truth is None:
            raise ConfigError(
                f"mock {role}:{kind} needs an annotation manifest to read ground truth"
            )
        return truth

    table = {
        ("analyzer", "oracle"): lambda: OracleAnalyzer(
            need_truth(),
            perturb_radius=config.perturb_radius,
            drop_prob=config.drop_prob,
            seed=config.seed,
        ),
        ("generator", "prompt_hash"): lambda: PromptHashGenerator(seed=config.seed),
        ("inpainter", "identity"): IdentityInpainter,
        ("inpainter", "constant"): lambda: ConstantFillInpainter(fill=config.fill),
        ("inpainter", "perfect"): lambda: PerfectInpainter(need_truth()),
        ("reviser", "echo"): EchoReviser,
        ("captioner", "constant"): lambda: ConstantCaptioner(text=config.caption),
        ("embedder", "hash"): lambda: HashEmbedder(dim=config.embed_dim),
        ("scorer", "area"): lambda: AreaScorer(need_truth()),
        ("scorer", "constant"): lambda: ConstantScorer(value=config.constant_score),
    }
    try:
        factory = table[(role, kind)]
    except KeyError:
        raise ConfigError(f"no mock of kind {kind!r} for role {role!r}") from None
    return factory()


def build_mock_suite(
    manifest: DatasetManifest | None = None,
    config: MockSuiteConfig | None = None,
    references: dict[str, np.ndarray] | None = None,
):
    """All-mock BackendSuite; ground-truth-backed roles need ``manifest``."""
    from forgeline.backends.suite import BackendSuite

    config = config or MockSuiteConfig()
    truth = _GroundTruth(manifest, references) if manifest is not None else None
    backends = {
        role: make_mock(role, getattr(config, role), config, truth)
        for role in ("analyzer", "generator", "inpainter", "reviser",
                     "captioner", "embedder", "scorer")
    }
    return BackendSuite(backends)
