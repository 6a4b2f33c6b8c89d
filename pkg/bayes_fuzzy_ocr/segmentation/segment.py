from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal, Optional

import numpy as np
import pandas as pd

from bayes_fuzzy_ocr.exceptions import DimensionMismatchError, NoValidColumnsError
from bayes_fuzzy_ocr.segmentation.config import FuzzyConfig
from bayes_fuzzy_ocr.segmentation.features import (
    ColumnFeatures,
    compute_features,
    vertical_projection,
)
from bayes_fuzzy_ocr.segmentation.fuzzy import infer
from bayes_fuzzy_ocr.segmentation.image import GlyphImage
from bayes_fuzzy_ocr.settings import SCORE_COLUMNS

CutMethod = Literal["fuzzy", "g_only", "h_only"]
CUT_METHODS: tuple[str, ...] = ("fuzzy", "g_only", "h_only")


@dataclass
class CutScore:
    """rho per column; invalid columns (boundary, blank) carry rho = 1."""

    rho: np.ndarray
    valid: np.ndarray
    features: ColumnFeatures

    def to_frame(self) -> pd.DataFrame:
        f = self.features
        return pd.DataFrame(
            {
                "i": np.arange(f.n),
                "d": f.d,
                "f": f.f,
                "g_t": f.g_t,
                "h_t": f.h_t,
                "rho": self.rho,
                "valid": self.valid,
            },
            columns=list(SCORE_COLUMNS),
        )


def score_columns(img: GlyphImage, config: Optional[FuzzyConfig] = None) -> CutScore:
    config = config or FuzzyConfig()
    if img.cols < 3:
        raise DimensionMismatchError(f"scoring needs at least 3 columns, got {img.cols}")
    feats = compute_features(img, config.peak_mode)
    partitions = config.partitions()
    rules = config.rule_base()
    rho = np.ones(feats.n)
    for i in np.flatnonzero(feats.valid):
        rho[i] = infer(feats.column(i), partitions, rules, config.universe_points)
    return CutScore(rho=rho, valid=feats.valid.copy(), features=feats)


def score_rows(img: GlyphImage, config: Optional[FuzzyConfig] = None) -> CutScore:
    return score_columns(img.transpose(), config)


def _best(candidates: np.ndarray, primary: np.ndarray, n: int, tie_break: str) -> int:
    """Index minimizing primary, then centre distance (unless tie_break == "index"), then index."""
    c = (n - 1) / 2.0
    if tie_break == "index":
        return int(min(candidates, key=lambda i: (primary[i], i)))
    return int(min(candidates, key=lambda i: (primary[i], abs(c - i), i)))


def select_cut(scores: CutScore, tie_break: str = "center") -> int:
    candidates = np.flatnonzero(scores.valid)
    if candidates.size == 0:
        raise NoValidColumnsError("no valid column to cut at")
    return _best(candidates, scores.rho, len(scores.rho), tie_break)


def baseline_cut(
    img: GlyphImage,
    method: Literal["g_only", "h_only"],
    config: Optional[FuzzyConfig] = None,
) -> int:
    """
    Single-feature cut: argmax of raw g (or raw h). Candidates are the inked interior columns
    plus white columns lying between ink; white margins are never cut.
    """
    config = config or FuzzyConfig()
    if img.cols < 3:
        raise DimensionMismatchError(f"scoring needs at least 3 columns, got {img.cols}")
    if method not in ("g_only", "h_only"):
        raise ValueError(f"unknown baseline {method!r}")
    feats = compute_features(img, config.peak_mode)
    values = feats.g if method == "g_only" else feats.h
    in_gap = np.zeros(feats.n, dtype=bool)
    for lo, hi in blank_gaps(feats.v):
        in_gap[lo : hi + 1] = True
    candidates = np.flatnonzero((feats.valid | in_gap) & np.isfinite(values))
    if candidates.size == 0:
        raise NoValidColumnsError(f"{method}: no interior column carries a value")
    return _best(candidates, -values, feats.n, config.tie_break)


def blank_gaps(V: np.ndarray) -> List[tuple[int, int]]:
    """Inclusive runs of empty columns lying strictly between the first and last inked column."""
    V = np.asarray(V)
    inked = np.flatnonzero(V > 0)
    if inked.size < 2:
        return []
    gaps = []
    start = None
    for i in range(int(inked[0]) + 1, int(inked[-1]) + 1):
        if V[i] == 0:
            start = i if start is None else start
        elif start is not None:
            gaps.append((start, i - 1))
            start = None
    return gaps


def blank_cut(img: GlyphImage) -> Optional[int]:
    """Middle of the widest interior white run, leftmost on ties; None if there is none."""
    gaps = blank_gaps(vertical_projection(img))
    if not gaps:
        return None
    lo, hi = max(gaps, key=lambda g: (g[1] - g[0], -g[0]))
    return (lo + hi) // 2


def locate_cut(img: GlyphImage, method: str = "fuzzy", config: Optional[FuzzyConfig] = None) -> int:
    config = config or FuzzyConfig()
    cut = blank_cut(img)
    if cut is not None:
        return cut
    if method == "fuzzy":
        return select_cut(score_columns(img, config), config.tie_break)
    if method in ("g_only", "h_only"):
        return baseline_cut(img, method, config)
    raise ValueError(f"unknown cut method {method!r}")


def segment(
    img: GlyphImage,
    max_chars: int,
    config: Optional[FuzzyConfig] = None,
    axis: Literal["columns", "rows"] = "columns",
) -> List[GlyphImage]:
    """
    Split a pattern into at most ``max_chars`` pieces. A cut at column i yields
    [0, i) and [i, n). The widest splittable piece is cut first.
    """
    if max_chars < 1:
        raise ValueError(f"max_chars must be >= 1, got {max_chars}")
    if axis == "rows":
        return [p.transpose() for p in segment(img.transpose(), max_chars, config)]
    config = config or FuzzyConfig()

    pieces = [img]
    while len(pieces) < max_chars:
        order = sorted(range(len(pieces)), key=lambda j: -pieces[j].cols)
        for j in order:
            piece = pieces[j]
            if piece.cols < 3 or piece.ink_count == 0:
                continue
            try:
                cut = locate_cut(piece, "fuzzy", config)
            except NoValidColumnsError:
                continue
            pieces[j : j + 1] = [piece.columns(0, cut), piece.columns(cut, piece.cols)]
            break
        else:
            break
    return pieces
