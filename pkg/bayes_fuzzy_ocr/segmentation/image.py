from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class GlyphImage:
    """Binarized pattern: m x n matrix, 1 = black ink, 0 = white."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"a glyph needs a non-empty 2-D matrix, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("glyph pixels must be strictly binary (0/1)")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    @property
    def ink_count(self) -> int:
        return int(self.pixels.sum())

    def column(self, i: int) -> np.ndarray:
        return self.pixels[:, i]

    def columns(self, lo: int, hi: int) -> "GlyphImage":
        return GlyphImage(self.pixels[:, lo:hi])

    def transpose(self) -> "GlyphImage":
        return GlyphImage(self.pixels.T)

    def mirror(self) -> "GlyphImage":
        return GlyphImage(self.pixels[:, ::-1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GlyphImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self) -> int:
        return hash((self.shape, self.pixels.tobytes()))
