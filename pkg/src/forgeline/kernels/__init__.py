"""Kernel backend selection.

The compiled extension is preferred; the NumPy fallback is used when the
extension is missing or FORGELINE_PURE_KERNELS=1 is set. Both expose the
same functions with identical semantics:

    fill_polygon(xs, ys, width, height) -> (H, W) uint8
    rle_encode(bits) -> int64 runs
    rle_decode(runs, n) -> flat uint8
    confusion_counts(pred, gt) -> (tp, fp, fn, tn)
    lcs_length(a, b) -> int
"""

import os

from forgeline.kernels import pure

if os.environ.get("FORGELINE_PURE_KERNELS") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from forgeline.kernels import _fast as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

fill_polygon = _impl.fill_polygon
rle_encode = _impl.rle_encode
rle_decode = _impl.rle_decode
confusion_counts = _impl.confusion_counts
lcs_length = _impl.lcs_length

__all__ = [
    "BACKEND",
    "confusion_counts",
    "fill_polygon",
    "lcs_length",
    "pure",
    "rle_decode",
    "rle_encode",
]
