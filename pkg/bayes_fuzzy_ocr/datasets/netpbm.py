"""
Netpbm bitmaps (P1/P4) and greymaps (P2/P5).

Header tokens are separated by whitespace and ``#`` starts a comment running to the end of the
line. Binary rasters start after exactly one whitespace byte. P4 packs each row MSB-first and
pads it to a byte boundary; 1 is black. PGM samples are one byte when maxval < 256, otherwise
two bytes big-endian. Greymaps are binarized with ink = value < threshold (dark pixels).
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

import numpy as np

from bayes_fuzzy_ocr.exceptions import NetpbmFormatError
from bayes_fuzzy_ocr.segmentation.image import GlyphImage

_COMMENT = re.compile(rb"#[^\n\r]*")


def _read_header(blob: bytes, n_tokens: int) -> tuple[list[int], int]:
    pos = 2
    tokens: list[bytes] = []
    while len(tokens) < n_tokens:
        if pos >= len(blob):
            raise NetpbmFormatError("truncated header")
        ch = blob[pos : pos + 1]
        if ch == b"#":
            end = blob.find(b"\n", pos)
            pos = len(blob) if end < 0 else end + 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(blob) and not blob[pos : pos + 1].isspace() and blob[pos : pos + 1] != b"#":
                pos += 1
            tokens.append(blob[start:pos])
    try:
        values = [int(t) for t in tokens]
    except ValueError as e:
        raise NetpbmFormatError(f"malformed header token: {e}") from e
    if values[0] < 1 or values[1] < 1:
        raise NetpbmFormatError(f"bad dimensions {values[0]}x{values[1]}")
    return values, pos


def _ascii_samples(blob: bytes, pos: int, count: int, single_digit: bool) -> np.ndarray:
    body = _COMMENT.sub(b" ", blob[pos:])
    if single_digit:
        digits = [c for c in body if c in b"01"]
        if len([c for c in body if not chr(c).isspace() and c not in b"01"]):
            raise NetpbmFormatError("P1 raster holds characters other than 0/1")
        samples = np.frombuffer(bytes(digits), dtype=np.uint8) - ord("0")
    else:
        try:
            samples = np.array([int(t) for t in body.split()], dtype=np.int64)
        except ValueError as e:
            raise NetpbmFormatError(f"malformed P2 sample: {e}") from e
    if samples.size < count:
        raise NetpbmFormatError(f"truncated raster: {samples.size} of {count} samples")
    return samples[:count]


def _binary_start(blob: bytes, pos: int) -> int:
    if pos >= len(blob) or not blob[pos : pos + 1].isspace():
        raise NetpbmFormatError("missing whitespace before binary raster")
    return pos + 1


def decode_pbm(blob: bytes) -> GlyphImage:
    magic = blob[:2]
    if magic not in (b"P1", b"P4"):
        raise NetpbmFormatError(f"not a PBM file (magic {magic!r})")
    (width, height), pos = _read_header(blob, 2)
    if magic == b"P1":
        samples = _ascii_samples(blob, pos, width * height, single_digit=True)
        return GlyphImage(samples.reshape(height, width))
    pos = _binary_start(blob, pos)
    row_bytes = (width + 7) // 8
    need = row_bytes * height
    if len(blob) - pos < need:
        raise NetpbmFormatError(f"truncated raster: {len(blob) - pos} of {need} bytes")
    packed = np.frombuffer(blob, dtype=np.uint8, count=need, offset=pos).reshape(height, row_bytes)
    return GlyphImage(np.unpackbits(packed, axis=1)[:, :width])


def decode_pgm_grey(blob: bytes) -> tuple[np.ndarray, int]:
    """Grey levels (height, width) and maxval."""
    magic = blob[:2]
    if magic not in (b"P2", b"P5"):
        raise NetpbmFormatError(f"not a PGM file (magic {magic!r})")
    (width, height, maxval), pos = _read_header(blob, 3)
    if not 0 < maxval < 65536:
        raise NetpbmFormatError(f"maxval {maxval} outside 1..65535")
    count = width * height
    if magic == b"P2":
        grey = _ascii_samples(blob, pos, count, single_digit=False)
    else:
        pos = _binary_start(blob, pos)
        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        if len(blob) - pos < count * dtype.itemsize:
            raise NetpbmFormatError("truncated raster")
        grey = np.frombuffer(blob, dtype=dtype, count=count, offset=pos).astype(np.int64)
    if grey.max(initial=0) > maxval:
        raise NetpbmFormatError(f"sample exceeds maxval {maxval}")
    return grey.reshape(height, width), maxval


def decode_pgm(blob: bytes, threshold: Optional[float] = None) -> GlyphImage:
    grey, maxval = decode_pgm_grey(blob)
    if threshold is None:
        threshold = maxval / 2.0
    return GlyphImage((grey < threshold).astype(np.uint8))


def load_pbm(path: str | Path) -> GlyphImage:
    return decode_pbm(Path(path).read_bytes())


def load_pgm(path: str | Path, threshold: Optional[float] = None) -> GlyphImage:
    return decode_pgm(Path(path).read_bytes(), threshold)


def load_netpbm(path: str | Path, threshold: Optional[float] = None) -> GlyphImage:
    blob = Path(path).read_bytes()
    if blob[:2] in (b"P1", b"P4"):
        return decode_pbm(blob)
    if blob[:2] in (b"P2", b"P5"):
        return decode_pgm(blob, threshold)
    raise NetpbmFormatError(f"{path}: unsupported netpbm magic {blob[:2]!r}")


def encode_pbm(img: GlyphImage, binary: bool = True) -> bytes:
    header = f"{'P4' if binary else 'P1'}\n{img.cols} {img.rows}\n".encode()
    if binary:
        return header + np.packbits(img.pixels, axis=1).tobytes()
    lines = [" ".join(str(int(v)) for v in row) for row in img.pixels]
    return header + ("\n".join(lines) + "\n").encode()


def write_pbm(img: GlyphImage, path: str | Path, binary: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pbm(img, binary))
    return path
