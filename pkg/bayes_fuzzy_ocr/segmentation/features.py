"""
Per-column cut features of a binarized pattern.

    V(i)  vertical projection (ink count of column i)
    g(i)  = (V(l_i) - 2V(i) + V(r_i)) / (V(i) + 1)   peak-to-valley, l_i/r_i flanking peaks
    h(i)  = (V(i-1) - 2V(i) + V(i+1)) / V(i)         second difference, undefined on blank columns
    d(i)  = |c - i| / c, c = (n - 1) / 2             distance from the centre
    f(i)  white/black transitions scanning column i top to bottom

g and h are min-max normalized over the valid columns and complemented (g_t = 1 - g_bar), so
low g_t / h_t mark deep valleys. Boundary columns carry no g/h and are never valid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Literal, Optional

import numpy as np

from bayes_fuzzy_ocr.exceptions import NoValidColumnsError
from bayes_fuzzy_ocr.segmentation.image import GlyphImage

PeakMode = Literal["global", "local"]


def vertical_projection(img: GlyphImage) -> np.ndarray:
    return img.pixels.sum(axis=0, dtype=np.int64)


def _climb(V: np.ndarray, start: int, step: int) -> int:
    j = start
    while 0 <= j + step < len(V) and V[j + step] > V[j]:
        j += step
    return j


def peak_positions(V: np.ndarray, i: int, peak_mode: PeakMode = "global") -> tuple[int, int]:
    if peak_mode == "local":
        return _climb(V, i - 1, -1), _climb(V, i + 1, +1)
    left = int(np.argmax(V[:i]))
    right = i + 1 + int(np.argmax(V[i + 1 :]))
    return left, right


def peak_to_valley(V: np.ndarray, i: int, peak_mode: PeakMode = "global") -> Optional[float]:
    """g(i); None on the boundary columns."""
    V = np.asarray(V, dtype=np.int64)
    if not 0 < i < len(V) - 1:
        return None
    left, right = peak_positions(V, i, peak_mode)
    return float(V[left] - 2 * V[i] + V[right]) / float(V[i] + 1)


def second_difference(V: np.ndarray, i: int) -> Optional[float]:
    """h(i); None on the boundary and on blank columns (V(i) = 0)."""
    V = np.asarray(V, dtype=np.int64)
    if not 0 < i < len(V) - 1 or V[i] == 0:
        return None
    return float(V[i - 1] - 2 * V[i] + V[i + 1]) / float(V[i])


def normalize_complement(values: np.ndarray, validity: np.ndarray) -> np.ndarray:
    """
    1 - min-max normalization over the valid entries. Invalid entries come back as NaN.
    A constant valid vector normalizes to 0, so its complement is all ones.
    """
    values = np.asarray(values, dtype=float)
    validity = np.asarray(validity, dtype=bool)
    if not validity.any():
        raise NoValidColumnsError("no valid interior columns to normalize")
    out = np.full(values.shape, np.nan)
    v = values[validity]
    lo, hi = v.min(), v.max()
    if hi > lo:
        out[validity] = 1.0 - (v - lo) / (hi - lo)
    else:
        out[validity] = 1.0
    return out


def crossing_count(img: GlyphImage, i: int) -> int:
    col = img.column(i)
    return int(np.count_nonzero(col[1:] != col[:-1]))


def center_distance(i: int, n: int) -> float:
    if n < 2:
        raise ValueError(f"centre distance needs n >= 2, got {n}")
    c = (n - 1) / 2.0
    return float(min(1.0, max(0.0, abs(c - i) / c)))


@dataclass
class ColumnFeatures:
    """Feature vectors over all n columns; g_t/h_t are NaN where ``valid`` is False."""

    v: np.ndarray
    d: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    g_t: np.ndarray
    h_t: np.ndarray
    valid: np.ndarray
    blank: np.ndarray

    @property
    def n(self) -> int:
        return len(self.v)

    def column(self, i: int) -> Dict[str, float]:
        return {
            "d": float(self.d[i]),
            "f": float(self.f[i]),
            "g_t": float(self.g_t[i]),
            "h_t": float(self.h_t[i]),
        }


def compute_features(img: GlyphImage, peak_mode: PeakMode = "global") -> ColumnFeatures:
    V = vertical_projection(img)
    n = img.cols
    g = np.array([np.nan if (x := peak_to_valley(V, i, peak_mode)) is None else x for i in range(n)])
    h = np.array([np.nan if (x := second_difference(V, i)) is None else x for i in range(n)])
    interior = np.zeros(n, dtype=bool)
    interior[1 : n - 1] = True
    valid = interior & (V > 0)

    try:
        g_t = normalize_complement(g, valid)
        h_t = normalize_complement(h, valid)
    except NoValidColumnsError:
        g_t = np.full(n, np.nan)
        h_t = np.full(n, np.nan)

    return ColumnFeatures(
        v=V,
        d=np.array([center_distance(i, n) for i in range(n)]) if n >= 2 else np.zeros(n),
        f=np.array([crossing_count(img, i) for i in range(n)], dtype=np.int64),
        g=g,
        h=h,
        g_t=g_t,
        h_t=h_t,
        valid=valid,
        blank=interior & (V == 0),
    )
