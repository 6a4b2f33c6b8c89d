"""
Synthetic touching-pair corpora and labelled PBM directories.

A corpus directory holds one P4 file per pair plus ``manifest.csv`` with the columns
``file,lo,hi,left_label,right_label``. A labelled glyph directory holds PBM/PGM files plus
``manifest.csv`` with ``file,label``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from bayes_fuzzy_ocr.datasets.glyphs import LabeledGlyph, TouchingPair, crop_to_ink, synth_touching
from bayes_fuzzy_ocr.datasets.netpbm import load_netpbm, load_pbm, write_pbm
from bayes_fuzzy_ocr.exceptions import BayesFuzzyOcrError, CorpusError
from bayes_fuzzy_ocr.logconf import logger
from bayes_fuzzy_ocr.settings import (
    CORPUS_MANIFEST,
    CORPUS_MANIFEST_COLUMNS,
    LABELED_MANIFEST_COLUMNS,
)

# A cropped glyph narrower than this cannot host an overlap and still leave interior columns.
MIN_GLYPH_WIDTH = 3


@dataclass
class CorpusEntry:
    file: str
    pair: Optional[TouchingPair] = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.pair is not None


def generate_touching_corpus(
    glyphs: Sequence[LabeledGlyph],
    pairs: int,
    overlaps: Sequence[int],
    seed: int,
) -> List[TouchingPair]:
    """
    Draw ``pairs`` (left, right, overlap) triples with one seeded generator and compose them
    from ink-cropped glyphs. Identical inputs give identical corpora.
    """
    if pairs < 1:
        raise CorpusError(f"pairs must be >= 1, got {pairs}")
    if not overlaps or min(overlaps) < 0:
        raise CorpusError(f"overlaps must be non-empty and >= 0, got {list(overlaps)}")
    cropped = [(crop_to_ink(g.image), g.label) for g in glyphs if g.image.ink_count > 0]
    usable = [(img, label) for img, label in cropped if img.cols >= max(MIN_GLYPH_WIDTH, max(overlaps) + 1)]
    if not usable:
        raise CorpusError("no glyph is wide enough for the requested overlaps")

    rng = np.random.default_rng(seed)
    corpus: List[TouchingPair] = []
    for _ in range(pairs):
        i, j = rng.integers(len(usable), size=2)
        overlap = int(overlaps[int(rng.integers(len(overlaps)))])
        (left, left_label), (right, right_label) = usable[int(i)], usable[int(j)]
        corpus.append(synth_touching(left, right, overlap, int(left_label), int(right_label)))
    logger.debug("touching_corpus_generated", pairs=pairs, overlaps=list(overlaps), seed=seed)
    return corpus


def _label_cell(value: Optional[int]) -> object:
    return "" if value is None else int(value)


def write_corpus(directory: str | Path, corpus: Sequence[TouchingPair]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for k, pair in enumerate(corpus):
        name = f"pair_{k:05d}.pbm"
        write_pbm(pair.image, directory / name)
        lo, hi = pair.truth_range
        rows.append((name, lo, hi, _label_cell(pair.left_label), _label_cell(pair.right_label)))
    manifest = directory / CORPUS_MANIFEST
    pd.DataFrame(rows, columns=list(CORPUS_MANIFEST_COLUMNS)).to_csv(
        manifest, index=False, lineterminator="\n"
    )
    return manifest


def _read_manifest(directory: Path, columns: Sequence[str]) -> pd.DataFrame:
    manifest = directory / CORPUS_MANIFEST
    if not manifest.is_file():
        raise CorpusError(f"no {CORPUS_MANIFEST} in {directory}")
    df = pd.read_csv(manifest, dtype={"file": str}, keep_default_na=False)
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise CorpusError(f"{manifest}: missing columns {', '.join(missing)}")
    return df


def _optional_label(value: object) -> Optional[int]:
    if value == "" or value is None:
        return None
    return int(value)


def read_corpus(directory: str | Path) -> List[CorpusEntry]:
    """
    Read every manifest row. Unreadable or inconsistent samples come back as entries carrying
    an error message instead of aborting the whole corpus.
    """
    directory = Path(directory)
    df = _read_manifest(directory, CORPUS_MANIFEST_COLUMNS)
    entries: List[CorpusEntry] = []
    for row in df.itertuples(index=False):
        try:
            image = load_pbm(directory / row.file)
            pair = TouchingPair(
                image,
                (int(row.lo), int(row.hi)),
                _optional_label(row.left_label),
                _optional_label(row.right_label),
            )
            entries.append(CorpusEntry(row.file, pair))
        except (BayesFuzzyOcrError, ValueError, OSError) as e:
            logger.warning("corpus_sample_unreadable", file=row.file, error=str(e))
            entries.append(CorpusEntry(row.file, error=f"{type(e).__name__}: {e}"))
    return entries


def load_labeled_pbm_dir(directory: str | Path, class_count: Optional[int] = None) -> List[LabeledGlyph]:
    """Glyphs listed in ``manifest.csv`` (file,label); class count defaults to max label + 1."""
    directory = Path(directory)
    df = _read_manifest(directory, LABELED_MANIFEST_COLUMNS)
    if df.empty:
        raise CorpusError(f"{directory}: empty manifest")
    try:
        labels = df["label"].astype(int).tolist()
    except ValueError as e:
        raise CorpusError(f"{directory}: non-integer label ({e})") from e
    classes = class_count if class_count is not None else max(labels) + 1
    return [
        LabeledGlyph(load_netpbm(directory / name), label, classes)
        for name, label in zip(df["file"], labels)
    ]
