"""
IDX container (MNIST).

    [offset] [type]          [value]
    0000     32 bit integer  0x00000803 images / 0x00000801 labels (big endian)
    0004     32 bit integer  dimension 0 (item count)
    0008     32 bit integer  dimension 1 (rows, images only)
    0012     32 bit integer  dimension 2 (cols, images only)
    ....     unsigned byte   raster, row-major

Files ending in ``.gz`` are read and written through gzip.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from math import prod
from pathlib import Path
from typing import Iterator, List, Sequence

import numpy as np

from bayes_fuzzy_ocr.datasets.glyphs import LabeledGlyph
from bayes_fuzzy_ocr.exceptions import IdxFormatError
from bayes_fuzzy_ocr.segmentation.image import GlyphImage

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
INK_THRESHOLD = 128
MAX_ELEMENTS = 1 << 32


def _read(path: str | Path) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as fh:
            return fh.read()
    return path.read_bytes()


def _write(path: str | Path, blob: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".gz":
        # name and mtime pinned so identical content gives identical bytes
        with open(path, "wb") as raw, gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as fh:
            fh.write(blob)
    else:
        path.write_bytes(blob)
    return path


def parse_idx(blob: bytes, expected_magic: int) -> np.ndarray:
    if len(blob) < 4:
        raise IdxFormatError("truncated header: missing magic number", len(blob))
    (magic,) = struct.unpack_from(">I", blob, 0)
    if magic != expected_magic:
        raise IdxFormatError(
            f"magic mismatch: expected 0x{expected_magic:08x}, got 0x{magic:08x}", 0
        )
    ndim = magic & 0xFF
    header_end = 4 + 4 * ndim
    if len(blob) < header_end:
        raise IdxFormatError(f"truncated header: {ndim} dimension counts expected", len(blob))
    dims = struct.unpack_from(f">{ndim}I", blob, 4)
    count = prod(dims)
    if count > MAX_ELEMENTS:
        raise IdxFormatError(f"dimension overflow: {dims} describes {count} elements", 4)
    if len(blob) - header_end < count:
        raise IdxFormatError(
            f"truncated raster: {count} bytes declared, {len(blob) - header_end} present",
            len(blob),
        )
    if len(blob) - header_end > count:
        raise IdxFormatError("trailing bytes after raster", header_end + count)
    return np.frombuffer(blob, dtype=np.uint8, count=count, offset=header_end).reshape(dims)


@dataclass
class IdxImageSet:
    """Binarized image stack (count, rows, cols) with the source path."""

    pixels: np.ndarray
    source: str = ""

    def __len__(self) -> int:
        return self.pixels.shape[0]

    @property
    def rows(self) -> int:
        return self.pixels.shape[1]

    @property
    def cols(self) -> int:
        return self.pixels.shape[2]

    def glyph(self, i: int) -> GlyphImage:
        return GlyphImage(self.pixels[i])

    def __iter__(self) -> Iterator[GlyphImage]:
        for i in range(len(self)):
            yield self.glyph(i)


def binarize(raster: np.ndarray, threshold: int = INK_THRESHOLD) -> np.ndarray:
    """MNIST stores ink as high grey levels: byte >= threshold is ink."""
    return (raster >= threshold).astype(np.uint8)


def load_idx_images(path: str | Path, threshold: int = INK_THRESHOLD) -> IdxImageSet:
    raster = parse_idx(_read(path), IMAGE_MAGIC)
    return IdxImageSet(binarize(raster, threshold), source=str(path))


def load_idx_labels(path: str | Path) -> np.ndarray:
    return parse_idx(_read(path), LABEL_MAGIC).copy()


def idx_bytes(array: np.ndarray, magic: int) -> bytes:
    array = np.asarray(array, dtype=np.uint8)
    header = struct.pack(">I", magic) + struct.pack(f">{array.ndim}I", *array.shape)
    return header + array.tobytes(order="C")


def write_idx_images(path: str | Path, images: Sequence[GlyphImage]) -> Path:
    """Binary glyphs are written as 0 / 255 grey levels, so reading back is the identity."""
    if not images:
        raise ValueError("no images to write")
    stack = np.stack([img.pixels for img in images]).astype(np.uint8) * 255
    return _write(path, idx_bytes(stack, IMAGE_MAGIC))


def write_idx_labels(path: str | Path, labels: Sequence[int]) -> Path:
    return _write(path, idx_bytes(np.asarray(labels, dtype=np.uint8), LABEL_MAGIC))


def load_mnist(images_path: str | Path, labels_path: str | Path, class_count: int = 10) -> List[LabeledGlyph]:
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise IdxFormatError(f"{len(images)} images but {len(labels)} labels", 4)
    return [
        LabeledGlyph(images.glyph(i), int(labels[i]), class_count) for i in range(len(images))
    ]
