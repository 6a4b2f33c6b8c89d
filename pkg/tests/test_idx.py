from __future__ import annotations

import gzip
import struct

import numpy as np
import pytest
from conftest import glyph

from bayes_fuzzy_ocr.datasets.idx import (
    IMAGE_MAGIC,
    LABEL_MAGIC,
    binarize,
    idx_bytes,
    load_idx_images,
    load_idx_labels,
    load_mnist,
    parse_idx,
    write_idx_images,
    write_idx_labels,
)
from bayes_fuzzy_ocr.exceptions import IdxFormatError


def _image_blob(raster: np.ndarray) -> bytes:
    return struct.pack(">IIII", IMAGE_MAGIC, *raster.shape) + raster.astype(np.uint8).tobytes()


def test_parse_hand_built_images():
    raster = np.array([[[0, 255], [127, 128]], [[200, 1], [0, 0]]], dtype=np.uint8)
    parsed = parse_idx(_image_blob(raster), IMAGE_MAGIC)
    np.testing.assert_array_equal(parsed, raster)
    np.testing.assert_array_equal(binarize(parsed)[0], [[0, 1], [0, 1]])


def test_binarize_threshold():
    np.testing.assert_array_equal(binarize(np.array([0, 127, 128, 255])), [0, 0, 1, 1])
    np.testing.assert_array_equal(binarize(np.array([0, 127, 128, 255]), threshold=1), [0, 1, 1, 1])


def test_magic_mismatch_reports_offset_zero():
    blob = idx_bytes(np.zeros(3, np.uint8), LABEL_MAGIC)
    with pytest.raises(IdxFormatError) as exc:
        parse_idx(blob, IMAGE_MAGIC)
    assert exc.value.offset == 0
    assert "magic" in str(exc.value)


@pytest.mark.parametrize("size", [0, 3, 8])
def test_truncated_header(size):
    blob = _image_blob(np.zeros((1, 2, 2), np.uint8))[:size]
    with pytest.raises(IdxFormatError) as exc:
        parse_idx(blob, IMAGE_MAGIC)
    assert exc.value.offset == size


def test_truncated_raster():
    blob = _image_blob(np.zeros((2, 3, 3), np.uint8))[:-1]
    with pytest.raises(IdxFormatError) as exc:
        parse_idx(blob, IMAGE_MAGIC)
    assert exc.value.offset == len(blob)


def test_trailing_bytes():
    blob = _image_blob(np.zeros((2, 3, 3), np.uint8)) + b"\x00\x00"
    with pytest.raises(IdxFormatError) as exc:
        parse_idx(blob, IMAGE_MAGIC)
    assert exc.value.offset == 16 + 18


def test_dimension_overflow():
    blob = struct.pack(">IIII", IMAGE_MAGIC, 1 << 20, 1 << 10, 1 << 10)
    with pytest.raises(IdxFormatError) as exc:
        parse_idx(blob, IMAGE_MAGIC)
    assert exc.value.offset == 4


@pytest.mark.parametrize("suffix", ["", ".gz"])
def test_written_files_read_back(tmp_path, suffix):
    images = [glyph("#.", ".#", "##"), glyph("..", "##", "..")]
    img_path = write_idx_images(tmp_path / f"images.idx{suffix}", images)
    lbl_path = write_idx_labels(tmp_path / f"labels.idx{suffix}", [7, 2])

    loaded = load_idx_images(img_path)
    assert (len(loaded), loaded.rows, loaded.cols) == (2, 3, 2)
    assert list(loaded) == images
    np.testing.assert_array_equal(load_idx_labels(lbl_path), [7, 2])


def test_gzip_output_is_reproducible(tmp_path):
    images = [glyph("#.", ".#")]
    a = write_idx_images(tmp_path / "a.idx.gz", images).read_bytes()
    b = write_idx_images(tmp_path / "b.idx.gz", images).read_bytes()
    assert a == b
    assert gzip.decompress(a)[:4] == struct.pack(">I", IMAGE_MAGIC)


def test_write_requires_images(tmp_path):
    with pytest.raises(ValueError):
        write_idx_images(tmp_path / "x.idx", [])


def test_load_mnist_pairs_images_with_labels(tmp_path):
    images = [glyph("#.", ".#"), glyph("##", ".."), glyph("..", "##")]
    write_idx_images(tmp_path / "img.idx", images)
    write_idx_labels(tmp_path / "lbl.idx", [3, 0, 9])
    glyphs = load_mnist(tmp_path / "img.idx", tmp_path / "lbl.idx")
    assert [g.label for g in glyphs] == [3, 0, 9]
    assert [g.image for g in glyphs] == images
    assert all(g.class_count == 10 for g in glyphs)


def test_load_mnist_rejects_count_mismatch(tmp_path):
    write_idx_images(tmp_path / "img.idx", [glyph("#")])
    write_idx_labels(tmp_path / "lbl.idx", [1, 2])
    with pytest.raises(IdxFormatError):
        load_mnist(tmp_path / "img.idx", tmp_path / "lbl.idx")


def test_load_mnist_rejects_out_of_range_label(tmp_path):
    write_idx_images(tmp_path / "img.idx", [glyph("#")])
    write_idx_labels(tmp_path / "lbl.idx", [4])
    with pytest.raises(ValueError):
        load_mnist(tmp_path / "img.idx", tmp_path / "lbl.idx", class_count=3)
