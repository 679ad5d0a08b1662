"""Image degradation operators: JPEG recompression, gaussian noise, blur.

All operators take and return 8-bit RGB arrays. Noise is drawn from a
counter-based Philox generator keyed on the seed, so a (image, sigma,
seed) triple always yields the same output on any platform.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image
from scipy import ndimage

from forgeline.errors import ValidationError

JPEG_QUALITIES = (50, 35, 20)
NOISE_SIGMAS = (0.1, 0.2, 0.3)
BLUR_KSIZES = (5, 9, 15)


def _check_image(image: np.ndarray) -> np.ndarray:
    arr = np.asarray(image)
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(
            f"expected an 8-bit RGB image, got dtype={arr.dtype} shape={arr.shape}"
        )
    return arr


def jpeg_compress(image: np.ndarray, quality: int) -> np.ndarray:
    """Encode at the given JPEG quality factor and decode back."""
    arr = _check_image(image)
    if not 1 <= int(quality) <= 95:
        raise ValidationError(f"JPEG quality must be in [1, 95], got {quality}")
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="JPEG", quality=int(quality))
    buf.seek(0)
    with Image.open(buf) as img:
        return np.asarray(img.convert("RGB"))


def gaussian_noise(image: np.ndarray, sigma: float, seed: int = 0) -> np.ndarray:
    """Additive gaussian noise with std ``sigma`` on the [0, 1] intensity
    scale, then clip and re-quantize to 8 bits."""
    arr = _check_image(image)
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return arr.copy()
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    noisy = arr.astype(np.float64) / 255.0 + rng.standard_normal(arr.shape) * sigma
    return np.clip(np.rint(noisy * 255.0), 0, 255).astype(np.uint8)


def blur_sigma(ksize: int) -> float:
    """Kernel std for a given aperture: 0.3*((ksize-1)*0.5 - 1) + 0.8."""
    return 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8


def gaussian_kernel_1d(ksize: int) -> np.ndarray:
    """Normalized 1-D gaussian taps for the aperture's derived sigma."""
    if ksize < 3 or ksize % 2 == 0:
        raise ValidationError(f"kernel size must be odd and >= 3, got {ksize}")
    sigma = blur_sigma(ksize)
    offsets = np.arange(ksize, dtype=np.float64) - (ksize - 1) / 2.0
    taps = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_blur(image: np.ndarray, ksize: int) -> np.ndarray:
    """Separable gaussian blur with replicated borders; sigma follows the
    aperture via :func:`blur_sigma`."""
    arr = _check_image(image)
    taps = gaussian_kernel_1d(ksize)
    out = arr.astype(np.float64)
    out = ndimage.convolve1d(out, taps, axis=0, mode="nearest")
    out = ndimage.convolve1d(out, taps, axis=1, mode="nearest")
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
