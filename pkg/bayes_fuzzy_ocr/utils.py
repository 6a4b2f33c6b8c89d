from __future__ import annotations

from pathlib import Path
from typing import Iterable, List

import pandas as pd

from bayes_fuzzy_ocr.exceptions import ConfigError
from bayes_fuzzy_ocr.settings import FLOAT_FORMAT

# ======================
# CLI value parsing
# ======================


def _coerce_float(value: str) -> float:
    v = str(value).strip()
    try:
        return float(v)
    except ValueError as e:
        raise ConfigError(f"not a number: {value!r}") from e


def _coerce_int(value: str) -> int:
    v = str(value).strip()
    try:
        return int(v)
    except ValueError as e:
        raise ConfigError(f"not an integer: {value!r}") from e


def parse_float_grid(spec: str) -> List[float]:
    """
    Parse `start:stop:step` (inclusive of stop) or a comma list `0.9,1.0,1.1`.
    Values are rounded to 10 decimals so `0.7:1.2:0.1` yields exactly six clean points.
    """
    spec = spec.strip()
    if not spec:
        raise ConfigError("empty grid")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:stop:step, got {spec!r}")
        start, stop, step = (_coerce_float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"grid needs step > 0 and stop >= start, got {spec!r}")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [_coerce_float(p) for p in spec.split(",") if p.strip()]


def parse_int_list(spec: str) -> List[int]:
    values = [_coerce_int(p) for p in spec.split(",") if p.strip()]
    if not values:
        raise ConfigError(f"empty integer list: {spec!r}")
    return values


def parse_int_range(spec: str) -> List[int]:
    """`lo:hi` inclusive, or a single integer."""
    if ":" in spec:
        lo, hi = (_coerce_int(p) for p in spec.split(":", 1))
        if hi < lo:
            raise ConfigError(f"range needs hi >= lo, got {spec!r}")
        return list(range(lo, hi + 1))
    return [_coerce_int(spec)]


def parse_seeds(spec: str) -> List[int]:
    """A bare count `10` means seeds 0..9; a comma list is taken literally."""
    if "," in spec:
        return parse_int_list(spec)
    count = _coerce_int(spec)
    if count < 1:
        raise ConfigError(f"seed count must be positive, got {spec!r}")
    return list(range(count))


# ======================
# CSV helpers
# ======================


def write_report_csv(
    df: pd.DataFrame,
    path: str | Path,
    *,
    header_comments: Iterable[str] = (),
) -> Path:
    """
    Write a report with `#` metadata lines, comma separator, LF endings and
    floats at 6 significant digits. Booleans are written lowercase.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = df.copy()
    for col in out.columns:
        if out[col].dtype == bool:
            out[col] = out[col].map({True: "true", False: "false"})
    body = out.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    head = "".join(f"# {line}\n" for line in header_comments)
    with open(path, "w", newline="") as fh:
        fh.write(head + body)
    return path


def read_report_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")

