"""NumPy fallback kernels.

Same contracts as the compiled module ``forgeline.kernels._fast``; used when
the extension is unavailable or when FORGELINE_PURE_KERNELS=1.
"""

from __future__ import annotations

import numpy as np


def fill_polygon(xs: np.ndarray, ys: np.ndarray, width: int, height: int) -> np.ndarray:
    """Rasterize one polygon with the even-odd rule sampled at pixel centers.

    Scanline algorithm: for each row y = i + 0.5, collect the x coordinates
    where polygon edges cross the row (half-open edge rule: an edge crosses
    iff exactly one endpoint satisfies v_y > y), sort them, and fill pixels
    whose center x = j + 0.5 lies in [c_0, c_1), [c_2, c_3), ...

    Returns a (height, width) uint8 array of {0, 1}.
    """
    out = np.zeros((height, width), dtype=np.uint8)
    x1 = np.asarray(xs, dtype=np.float64)
    y1 = np.asarray(ys, dtype=np.float64)
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    ymin = min(y1.min(), y2.min())
    ymax = max(y1.max(), y2.max())
    row_lo = max(0, int(np.floor(ymin - 0.5)))
    row_hi = min(height, int(np.ceil(ymax + 0.5)))
    for i in range(row_lo, row_hi):
        py = i + 0.5
        crossing = (y1 > py) != (y2 > py)
        if not crossing.any():
            continue
        t = (py - y1[crossing]) / (y2[crossing] - y1[crossing])
        cx = np.sort(x1[crossing] + t * (x2[crossing] - x1[crossing]))
        for k in range(0, len(cx) - 1, 2):
            # pixel center j + 0.5 in [cx[k], cx[k+1])
            lo = int(np.ceil(cx[k] - 0.5))
            hi = int(np.ceil(cx[k + 1] - 0.5))
            if hi > 0 and lo < width:
                out[i, max(lo, 0) : min(hi, width)] = 1
    return out


def rle_encode(bits: np.ndarray) -> np.ndarray:
    """Row-major run lengths, alternating values starting with zeros.

    The first run counts leading zeros and may be 0.
    """
    flat = np.ascontiguousarray(bits, dtype=np.uint8).ravel()
    if flat.size == 0:
        return np.zeros(0, dtype=np.int64)
    boundaries = np.flatnonzero(np.diff(flat)) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    runs = np.diff(edges).astype(np.int64)
    if flat[0] == 1:
        runs = np.concatenate(([0], runs))
    return runs


def rle_decode(runs: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`rle_encode` for a flat length-``n`` bit array."""
    runs = np.asarray(runs, dtype=np.int64)
    if runs.size and runs.min() < 0:
        raise ValueError("run lengths must be non-negative")
    total = int(runs.sum())
    if total != n:
        raise ValueError(f"run lengths sum to {total}, expected {n}")
    values = np.arange(len(runs), dtype=np.int64) % 2
    return np.repeat(values.astype(np.uint8), runs)


def confusion_counts(pred: np.ndarray, gt: np.ndarray) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) pixel counts for two equally shaped {0,1} arrays."""
    p = np.asarray(pred, dtype=bool)
    g = np.asarray(gt, dtype=bool)
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = p.size - tp - fp - fn
    return tp, fp, fn, tn


def lcs_length(a: np.ndarray, b: np.ndarray) -> int:
    """Length of the longest common subsequence of two int token arrays.

    Row-wise DP: within a row, cur[j] = max(candidate[j], cur[j-1]) where the
    candidates only read the previous row, so the inner sweep collapses to a
    running maximum.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return 0
    prev = np.zeros(b.size + 1, dtype=np.int64)
    for tok in a:
        matched = np.where(b == tok, prev[:-1] + 1, 0)
        cur = np.maximum(prev[1:], matched)
        np.maximum.accumulate(cur, out=cur)
        prev[1:] = cur
    return int(prev[-1])
