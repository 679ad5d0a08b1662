"""Refinement pipelines: memory bookkeeping, compositing, convergence, logs."""

from __future__ import annotations

import json

import numpy as np
import pytest

from forgeline.annotations.types import BinaryMask
from forgeline.backends.mocks import MockSuiteConfig, build_mock_suite, image_digest
from forgeline.backends.suite import BackendSuite
from forgeline.errors import TransportError, ValidationError
from forgeline.refine.inpaint import (
    DEFAULT_ITERS,
    composite_region,
    run_inpainting,
)
from forgeline.refine.memory import MemoryBank
from forgeline.refine.regen import DEFAULT_MAX_ITERS, run_regeneration
from forgeline.refine.runlog import (
    load_run_log,
    run_and_log_inpainting,
    run_and_log_regeneration,
    validate_run_log,
)

from conftest import gradient_image


class TestMemoryBank:
    def test_appends_and_dedupes(self):
        bank = MemoryBank()
        assert bank.add("first hint")
        assert not bank.add("first hint")
        assert bank.add("second hint")
        assert bank.items() == ["first hint", "second hint"]
        assert len(bank) == 2
        assert "first hint" in bank

    def test_preserves_insertion_order(self):
        bank = MemoryBank()
        for text in ("c", "a", "b", "a"):
            bank.add(text)
        assert bank.items() == ["c", "a", "b"]

    def test_items_returns_copy(self):
        bank = MemoryBank()
        bank.add("x")
        bank.items().append("y")
        assert bank.items() == ["x"]


class TestCompositeRegion:
    def test_merges_only_masked_pixels(self):
        base = gradient_image(6, 6, phase=0)
        patch = gradient_image(6, 6, phase=3)
        mask = np.zeros((6, 6), dtype=np.uint8)
        mask[1:3, 2:5] = 1
        out = composite_region(base, patch, BinaryMask(mask))
        chosen = mask.astype(bool)
        np.testing.assert_array_equal(out[chosen], patch[chosen])
        np.testing.assert_array_equal(out[~chosen], base[~chosen])

    def test_shape_checks(self):
        base = gradient_image(6, 6)
        with pytest.raises(ValidationError):
            composite_region(base, gradient_image(6, 7), BinaryMask.zeros(6, 6))
        with pytest.raises(ValidationError):
            composite_region(base, base, BinaryMask.zeros(5, 6))

    def test_inputs_not_mutated(self):
        base = gradient_image(4, 4)
        patch = gradient_image(4, 4, phase=9)
        snapshot = base.copy()
        mask = np.ones((4, 4), dtype=np.uint8)
        composite_region(base, patch, BinaryMask(mask))
        np.testing.assert_array_equal(base, snapshot)


class TestInpaintingPipeline:
    def test_converges_on_paired_fixture(self, paired_workspace, mock_suite):
        image_id = paired_workspace.entry_ids()[0]
        result = run_inpainting(
            mock_suite, paired_workspace.images[image_id], image_id=image_id
        )
        assert result.converged
        pixel_counts = [it.artifact_pixels for it in result.iterations]
        assert pixel_counts[-1] == 0
        assert all(a >= b for a, b in zip(pixel_counts, pixel_counts[1:]))
        np.testing.assert_array_equal(
            result.final_image, paired_workspace.references[image_id]
        )

    def test_identity_inpainter_never_changes_image(self, paired_workspace):
        config = MockSuiteConfig(seed=7, inpainter="identity")
        suite = build_mock_suite(paired_workspace.manifest, config,
                                 references=paired_workspace.references)
        image_id = paired_workspace.entry_ids()[1]
        image = paired_workspace.images[image_id]
        result = run_inpainting(suite, image, image_id=image_id, iters=3)
        assert not result.converged
        np.testing.assert_array_equal(result.final_image, image)
        assert len(result.iterations) == DEFAULT_ITERS + 1

    def test_out_of_mask_pixels_untouched_every_iteration(self, paired_workspace):
        config = MockSuiteConfig(seed=7, inpainter="constant", fill=(1, 2, 3))
        suite = build_mock_suite(paired_workspace.manifest, config,
                                 references=paired_workspace.references)
        image_id = paired_workspace.entry_ids()[0]
        image = paired_workspace.images[image_id]
        gt = paired_workspace.gt_masks[image_id].astype(bool)
        result = run_inpainting(suite, image, image_id=image_id, iters=1)
        for iteration in result.iterations[1:]:
            np.testing.assert_array_equal(iteration.image[~gt], image[~gt])

    def test_modes_agree_on_disjoint_masks(self, paired_workspace):
        config = MockSuiteConfig(seed=7, inpainter="perfect")
        suite = build_mock_suite(paired_workspace.manifest, config,
                                 references=paired_workspace.references)
        # Fixture regions are pairwise disjoint by construction.
        image_id = paired_workspace.entry_ids()[1]
        image = paired_workspace.images[image_id]
        a = run_inpainting(suite, image, image_id=image_id, mode="paper_faithful")
        b = run_inpainting(suite, image, image_id=image_id, mode="sequential")
        np.testing.assert_array_equal(a.final_image, b.final_image)

    def test_unknown_mode_rejected(self, paired_workspace, mock_suite):
        image_id = paired_workspace.entry_ids()[0]
        with pytest.raises(ValidationError):
            run_inpainting(
                mock_suite, paired_workspace.images[image_id],
                image_id=image_id, mode="diagonal",
            )

    def test_iteration_budget_respected(self, paired_workspace):
        config = MockSuiteConfig(seed=7, inpainter="identity")
        suite = build_mock_suite(paired_workspace.manifest, config,
                                 references=paired_workspace.references)
        image_id = paired_workspace.entry_ids()[0]
        result = run_inpainting(
            suite, paired_workspace.images[image_id], image_id=image_id, iters=2
        )
        assert len(result.iterations) == 3  # initial analysis + 2 rounds


class TestRegenerationPipeline:
    def test_memory_accumulates_region_explanations(self, paired_workspace, mock_suite):
        image_id = paired_workspace.entry_ids()[1]  # two regions
        image = paired_workspace.images[image_id]
        result = run_regeneration(mock_suite, image, image_id=image_id)
        reported = []
        for iteration in result.iterations[:-1]:
            reported.extend(r.explanation for r in iteration.report.regions)
        # Deduplicated union, insertion-ordered.
        assert result.memory == list(dict.fromkeys(reported))

    def test_prompts_chain_through_reviser(self, paired_workspace, mock_suite):
        image_id = paired_workspace.entry_ids()[0]
        image = paired_workspace.images[image_id]
        result = run_regeneration(
            mock_suite, image, "a clean product photo", image_id=image_id
        )
        prompts = [it.prompt for it in result.iterations]
        assert prompts[0] == "a clean product photo"
        for earlier, later in zip(prompts, prompts[1:]):
            assert later.startswith("a clean product photo")
            assert len(later) >= len(earlier)

    def test_default_iteration_budget(self, paired_workspace, mock_suite):
        image_id = paired_workspace.entry_ids()[0]
        result = run_regeneration(
            mock_suite, paired_workspace.images[image_id], image_id=image_id
        )
        # Generated images drift from the reference, so no convergence:
        # initial analysis plus DEFAULT_MAX_ITERS rounds.
        assert len(result.iterations) == DEFAULT_MAX_ITERS + 1
        assert not result.converged

    def test_caption_used_when_prompt_missing(self, paired_workspace, mock_suite):
        image_id = paired_workspace.entry_ids()[0]
        result = run_regeneration(
            mock_suite, paired_workspace.images[image_id], image_id=image_id
        )
        assert result.iterations[0].prompt == mock_suite.captioner.caption(
            paired_workspace.images[image_id]
        )

    def test_rejects_non_rgb_image(self, mock_suite):
        with pytest.raises(ValidationError):
            run_regeneration(mock_suite, np.zeros((4, 4), dtype=np.uint8),
                             image_id="img_00")


def _suite_with(base_suite: BackendSuite, **replacements) -> BackendSuite:
    backends = {role: base_suite.get(role) for role in base_suite.roles()}
    backends.update(replacements)
    return BackendSuite(backends)


class _ExplodingInpainter:
    kind = "exploding"
    calls = 0

    def inpaint(self, image, mask, explanation, location=None, image_id=None):
        type(self).calls += 1
        raise TransportError("backend went away")


class TestRunLogs:
    def test_inpaint_log_validates_and_reloads(self, paired_workspace, mock_suite,
                                               tmp_path):
        image_id = paired_workspace.entry_ids()[0]
        result, log_path = run_and_log_inpainting(
            mock_suite, paired_workspace.images[image_id],
            image_id=image_id, out_dir=tmp_path / "run",
        )
        payload = load_run_log(log_path)
        validate_run_log(payload)
        assert payload["status"] == "completed"
        assert payload["image_id"] == image_id
        assert payload["error"] is None
        assert len(payload["iterations"]) == len(result.iterations)
        assert payload["iterations"][-1]["artifact_pixels"] == 0
        # Saved PNGs decode to exactly the pixels the log hashed.
        from PIL import Image

        from forgeline.refine.runlog import _sha256_image

        for record in payload["iterations"]:
            image_file = log_path.parent / record["image_file"]
            assert image_file.exists()
            with Image.open(image_file) as img:
                pixels = np.asarray(img.convert("RGB"))
            assert _sha256_image(pixels) == record["image_sha256"]

    def test_regen_log_round_trips_memory(self, paired_workspace, mock_suite, tmp_path):
        image_id = paired_workspace.entry_ids()[1]
        result, log_path = run_and_log_regeneration(
            mock_suite, paired_workspace.images[image_id],
            image_id=image_id, out_dir=tmp_path / "run",
        )
        payload = load_run_log(log_path)
        validate_run_log(payload)
        assert payload["memory"] == result.memory
        assert [rec["prompt"] for rec in payload["iterations"]] == [
            it.prompt for it in result.iterations
        ]

    def test_same_seed_gives_bit_identical_logs(self, paired_workspace, tmp_path):
        image_id = paired_workspace.entry_ids()[0]
        image = paired_workspace.images[image_id]
        texts = []
        for run_dir in ("a", "b"):
            config = MockSuiteConfig(seed=123, inpainter="perfect")
            suite = build_mock_suite(paired_workspace.manifest, config,
                                     references=paired_workspace.references)
            _, log_path = run_and_log_inpainting(
                suite, image, image_id=image_id, out_dir=tmp_path / run_dir,
            )
            texts.append(log_path.read_text())
        assert texts[0] == texts[1]

    def test_abort_persists_partial_log(self, paired_workspace, mock_suite, tmp_path):
        image_id = paired_workspace.entry_ids()[0]
        broken = _suite_with(mock_suite, inpainter=_ExplodingInpainter())
        with pytest.raises(TransportError):
            run_and_log_inpainting(
                broken, paired_workspace.images[image_id],
                image_id=image_id, out_dir=tmp_path / "aborted",
            )
        payload = load_run_log(tmp_path / "aborted" / "run_log.json")
        validate_run_log(payload)
        assert payload["status"] == "aborted"
        assert payload["error"]["type"] == "TransportError"
        assert "backend went away" in payload["error"]["message"]
        # The initial analysis round was still recorded.
        assert len(payload["iterations"]) == 1

    def test_log_config_echo(self, paired_workspace, mock_suite, tmp_path):
        image_id = paired_workspace.entry_ids()[0]
        _, log_path = run_and_log_inpainting(
            mock_suite, paired_workspace.images[image_id],
            image_id=image_id, iters=2, mode="sequential",
            out_dir=tmp_path / "run",
        )
        payload = load_run_log(log_path)
        assert payload["config"]["iters"] == 2
        assert payload["config"]["mode"] == "sequential"
        assert payload["backends"]["inpainter"] == "mock:perfect"
