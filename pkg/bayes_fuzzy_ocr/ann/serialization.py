"""
Binary Mlp format, version 1 (all integers little-endian):

    offset  size      field
    0       5         magic b"BFMLP"
    5       1         format version (uint8, = 1)
    6       4         L (uint32)
    10      4*L       N(1..L) (uint32 each)
    ..      1         activation (uint8: 0 tanh, 1 sigmoid)
    ..      1         bias flag (uint8: 0/1)
    ..      8*sum     weights w^(2..L), float64, row-major, layer after layer
    ..      8*sum     biases b^(2..L), float64, present only when the bias flag is 1
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from bayes_fuzzy_ocr.ann.mlp import ACTIVATIONS, Mlp
from bayes_fuzzy_ocr.exceptions import ModelFormatError

MAGIC = b"BFMLP"
FORMAT_VERSION = 1


def mlp_to_bytes(net: Mlp) -> bytes:
    parts = [
        MAGIC,
        struct.pack("<B", FORMAT_VERSION),
        struct.pack("<I", net.n_layers),
        struct.pack(f"<{net.n_layers}I", *net.layer_sizes),
        struct.pack("<BB", ACTIVATIONS.index(net.activation), int(net.use_bias)),
    ]
    parts.extend(w.astype("<f8").tobytes(order="C") for w in net.weights)
    if net.biases is not None:
        parts.extend(b.astype("<f8").tobytes() for b in net.biases)
    return b"".join(parts)


def _need(blob: bytes, end: int, what: str) -> None:
    if len(blob) < end:
        raise ModelFormatError(f"truncated {what}", len(blob))


def mlp_from_bytes(blob: bytes) -> Mlp:
    _need(blob, 6, "header")
    if blob[:5] != MAGIC:
        raise ModelFormatError("not a serialized Mlp (bad magic)", 0)
    version = blob[5]
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported Mlp format version {version}", 5)
    _need(blob, 10, "header")
    (n_layers,) = struct.unpack_from("<I", blob, 6)
    if n_layers < 2:
        raise ModelFormatError(f"an Mlp needs at least two layers, got {n_layers}", 6)
    pos = 10
    _need(blob, pos + 4 * n_layers + 2, "header")
    sizes = struct.unpack_from(f"<{n_layers}I", blob, pos)
    pos += 4 * n_layers
    act_code, bias_flag = struct.unpack_from("<BB", blob, pos)
    if act_code >= len(ACTIVATIONS):
        raise ModelFormatError(f"unknown activation code {act_code}", pos)
    if bias_flag not in (0, 1):
        raise ModelFormatError(f"bias flag must be 0 or 1, got {bias_flag}", pos + 1)
    pos += 2

    def _take(shape: tuple[int, ...]) -> np.ndarray:
        nonlocal pos
        count = int(np.prod(shape))
        _need(blob, pos + 8 * count, "Mlp payload")
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=pos).reshape(shape)
        pos += 8 * count
        return arr.astype(float)

    weights = [_take((sizes[k + 1], sizes[k])) for k in range(n_layers - 1)]
    biases = [_take((n,)) for n in sizes[1:]] if bias_flag else None
    if pos != len(blob):
        raise ModelFormatError("trailing bytes after Mlp payload", pos)
    return Mlp(tuple(sizes), weights, ACTIVATIONS[act_code], biases)


def save_mlp(net: Mlp, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(mlp_to_bytes(net))
    return path


def load_mlp(path: str | Path) -> Mlp:
    return mlp_from_bytes(Path(path).read_bytes())
