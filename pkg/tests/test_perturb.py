"""Degradation ops and the robustness sweep."""

from __future__ import annotations

import hashlib

import numpy as np
import pytest

from forgeline.backends.mocks import MockSuiteConfig, build_mock_suite
from forgeline.errors import ValidationError
from forgeline.perturb.ops import (
    BLUR_KSIZES,
    JPEG_QUALITIES,
    NOISE_SIGMAS,
    blur_sigma,
    gaussian_blur,
    gaussian_kernel_1d,
    gaussian_noise,
    jpeg_compress,
)
from forgeline.perturb.robustness import (
    GridCell,
    default_grid,
    parse_grid,
    run_robustness,
)

from conftest import gradient_image


def _sha(arr: np.ndarray) -> str:
    return hashlib.sha256(arr.tobytes()).hexdigest()


@pytest.fixture(scope="module")
def noise_fixture() -> np.ndarray:
    rng = np.random.default_rng(42)
    return rng.integers(0, 256, (32, 40, 3), dtype=np.uint8)


class TestJpeg:
    def test_deterministic(self, noise_fixture):
        a = jpeg_compress(noise_fixture, 50)
        b = jpeg_compress(noise_fixture, 50)
        np.testing.assert_array_equal(a, b)

    def test_low_quality_changes_noise_image(self, noise_fixture):
        out = jpeg_compress(noise_fixture, 20)
        assert out.shape == noise_fixture.shape
        assert not np.array_equal(out, noise_fixture)

    def test_quality_ordering_on_noise(self, noise_fixture):
        """Lower quality -> larger reconstruction error on a noise image."""
        errors = []
        for quality in JPEG_QUALITIES:
            out = jpeg_compress(noise_fixture, quality)
            errors.append(
                float(np.mean((out.astype(np.int64) - noise_fixture.astype(np.int64)) ** 2))
            )
        assert errors[0] < errors[2]  # QF 50 better than QF 20

    def test_quality_range_enforced(self, noise_fixture):
        with pytest.raises(ValidationError):
            jpeg_compress(noise_fixture, 0)
        with pytest.raises(ValidationError):
            jpeg_compress(noise_fixture, 96)


class TestGaussianNoise:
    # Frozen first-computation golden value (Philox keyed by the seed,
    # additive N(0, sigma) on the [0,1] scale, clipped and rounded).
    GOLDEN_SHA = "b56482e85b5bcc9e03a5bd64f9a5e99e1b6ceb3378b5fe1a8e5a98022a69b7bc"

    def test_golden_hash(self, noise_fixture):
        out = gaussian_noise(noise_fixture, 0.2, seed=7)
        assert _sha(out) == self.GOLDEN_SHA

    def test_seed_determinism_and_sensitivity(self, noise_fixture):
        a = gaussian_noise(noise_fixture, 0.1, seed=3)
        b = gaussian_noise(noise_fixture, 0.1, seed=3)
        c = gaussian_noise(noise_fixture, 0.1, seed=4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_sigma_zero_is_identity(self, noise_fixture):
        out = gaussian_noise(noise_fixture, 0.0, seed=1)
        np.testing.assert_array_equal(out, noise_fixture)
        assert out is not noise_fixture

    def test_noise_magnitude_scales(self):
        flat = np.full((64, 64, 3), 128, dtype=np.uint8)
        small = gaussian_noise(flat, 0.1, seed=5).astype(np.float64)
        large = gaussian_noise(flat, 0.3, seed=5).astype(np.float64)
        assert large.std() > small.std() * 1.5

    def test_negative_sigma_rejected(self, noise_fixture):
        with pytest.raises(ValidationError):
            gaussian_noise(noise_fixture, -0.1, seed=0)


class TestGaussianBlur:
    GOLDEN_SHA = "37c45638c07ee3ac2f74c0f3dbc15888555fcd124054201978ba63cf8185d443"

    def test_golden_hash(self, noise_fixture):
        assert _sha(gaussian_blur(noise_fixture, 5)) == self.GOLDEN_SHA

    def test_sigma_formula(self):
        assert blur_sigma(5) == pytest.approx(1.1)
        assert blur_sigma(9) == pytest.approx(1.7)
        assert blur_sigma(15) == pytest.approx(2.6)

    def test_kernel_normalized_and_symmetric(self):
        for ksize in BLUR_KSIZES:
            kernel = gaussian_kernel_1d(ksize)
            assert kernel.sum() == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(kernel, kernel[::-1])
            assert len(kernel) == ksize

    def test_even_or_tiny_ksize_rejected(self):
        with pytest.raises(ValidationError):
            gaussian_kernel_1d(4)
        with pytest.raises(ValidationError):
            gaussian_kernel_1d(1)

    def test_constant_image_unchanged(self):
        flat = np.full((10, 12, 3), 77, dtype=np.uint8)
        np.testing.assert_array_equal(gaussian_blur(flat, 9), flat)

    def test_wider_kernel_smooths_checkerboard_more(self):
        # 2-px blocks: coarse enough that the attenuation difference
        # survives uint8 rounding (a 1-px board quantizes identically).
        yy, xx = np.indices((64, 64))
        board = ((((yy // 2) + (xx // 2)) % 2) * 255).astype(np.uint8)
        board = np.stack([board] * 3, axis=-1)
        var5 = float(gaussian_blur(board, 5).astype(np.float64).var())
        var15 = float(gaussian_blur(board, 15).astype(np.float64).var())
        assert var15 < var5


class TestGrid:
    def test_default_grid_is_the_full_table(self):
        labels = [cell.label for cell in default_grid()]
        assert labels == [
            "No Distortion",
            "JPEG Comp. (QF = 50)",
            "JPEG Comp. (QF = 35)",
            "JPEG Comp. (QF = 20)",
            "Gaussian Noise (σ = 0.1)",
            "Gaussian Noise (σ = 0.2)",
            "Gaussian Noise (σ = 0.3)",
            "Gaussian Blur (Ksize = 5)",
            "Gaussian Blur (Ksize = 9)",
            "Gaussian Blur (Ksize = 15)",
        ]

    def test_grid_parameters(self):
        cells = default_grid()
        assert [c.param for c in cells if c.family == "jpeg"] == list(JPEG_QUALITIES)
        assert [c.param for c in cells if c.family == "noise"] == list(NOISE_SIGMAS)
        assert [c.param for c in cells if c.family == "blur"] == list(BLUR_KSIZES)

    def test_parse_grid_subset(self):
        cells = parse_grid("jpeg:50,20;blur:9")
        assert [c.label for c in cells] == [
            "No Distortion",
            "JPEG Comp. (QF = 50)",
            "JPEG Comp. (QF = 20)",
            "Gaussian Blur (Ksize = 9)",
        ]

    def test_parse_grid_default_token(self):
        assert [c.label for c in parse_grid("default")] == [
            c.label for c in default_grid()
        ]

    def test_parse_grid_rejects_unknown_family(self):
        with pytest.raises(ValidationError):
            parse_grid("sharpen:2")
        with pytest.raises(ValidationError):
            parse_grid("jpeg:")

    def test_off_table_params_fail_at_apply_time(self):
        # Parameters are validated by the ops themselves when applied.
        (bad_blur,) = [c for c in parse_grid("blur:4") if c.family == "blur"]
        with pytest.raises(ValidationError):
            bad_blur.apply(gradient_image(8, 8), seed=0, image_id="q")

    def test_cell_apply_deterministic_per_image_id(self):
        image = gradient_image(16, 16, phase=1)
        cell = GridCell(family="noise", param=0.2)
        a = cell.apply(image, seed=9, image_id="x")
        b = cell.apply(image, seed=9, image_id="x")
        c = cell.apply(image, seed=9, image_id="y")
        d = cell.apply(image, seed=10, image_id="x")
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)

    def test_baseline_cell_is_identity(self):
        image = gradient_image(8, 8)
        cell = GridCell(family="none", param=None)
        np.testing.assert_array_equal(cell.apply(image, seed=3, image_id="z"), image)


class TestRobustnessSweep:
    def test_all_rows_present_and_scored(self, paired_workspace, mock_suite):
        report = run_robustness(
            mock_suite.analyzer, paired_workspace.manifest,
            paired_workspace.images, grid=default_grid(), seed=0,
        )
        assert [row.label for row in report.rows] == [
            c.label for c in default_grid()
        ]
        for row in report.rows:
            assert row.error is None
            assert 0.0 <= row.miou <= 100.0
            assert 0.0 <= row.f1 <= 100.0
        for row in report.rows:
            assert row.n == 10

    def test_oracle_without_references_is_distortion_blind(self, paired_workspace):
        """Without registered clean references the oracle reports the
        annotated regions regardless of pixel content, so every cell must
        match the clean baseline exactly."""
        config = MockSuiteConfig(seed=7)
        suite = build_mock_suite(paired_workspace.manifest, config, references=None)
        report = run_robustness(
            suite.analyzer, paired_workspace.manifest, paired_workspace.images,
            grid=parse_grid("jpeg:20;noise:0.3;blur:15"), seed=0,
        )
        baseline = report.row("No Distortion")
        assert baseline.miou == pytest.approx(100.0)
        for row in report.rows:
            assert row.miou == pytest.approx(baseline.miou)
            assert row.f1 == pytest.approx(baseline.f1)
            assert row.miou_ratio == pytest.approx(1.0)

    def test_failed_cell_recorded_not_fatal(self, paired_workspace):
        class Flaky:
            def __init__(self, inner):
                self.inner = inner

            def analyze(self, image, image_id=None):
                if image_id == "img_03":
                    raise ValidationError("simulated cell failure")
                return self.inner.analyze(image, image_id=image_id)

        config = MockSuiteConfig(seed=7)
        suite = build_mock_suite(paired_workspace.manifest, config, references=None)
        report = run_robustness(
            Flaky(suite.analyzer), paired_workspace.manifest,
            paired_workspace.images, grid=parse_grid("jpeg:50"), seed=0,
        )
        for row in report.rows:
            assert row.error is not None
            assert "simulated cell failure" in row.error

    def test_report_dict_shape(self, paired_workspace, mock_suite):
        report = run_robustness(
            mock_suite.analyzer, paired_workspace.manifest,
            paired_workspace.images, grid=parse_grid("noise:0.1"), seed=4,
        )
        payload = report.to_dict()
        assert payload["schema_version"] == 1
        assert payload["seed"] == 4
        assert {row["label"] for row in payload["rows"]} == {
            "No Distortion", "Gaussian Noise (σ = 0.1)",
        }
