"""
Fuzzy segmentation configuration.

File grammar: one ``KEY=VALUE`` per line, ``#`` starts a comment, blank lines ignored
(dotenv syntax). Partition keys take four comma-separated numbers ``a,b,c,d``; ``inf`` is
accepted for right shoulders.

    D_LOW, D_MEDIUM, D_HIGH          membership of the centre distance d
    F_LOW, F_HIGH                    membership of the crossing count f
    GH_LOW, GH_MEDIUM, GH_HIGH       membership shared by g_t, h_t and rho
    PEAK_MODE   = global | local
    TIE_BREAK   = center | index
    RULE7_G     = g_tilde | g_bar
    UNIVERSE_POINTS = integer >= 11
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Literal, Tuple

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from bayes_fuzzy_ocr.exceptions import ConfigError
from bayes_fuzzy_ocr.segmentation.fuzzy import FuzzyPartition, RuleBase, Trapezoid, default_rule_base
from bayes_fuzzy_ocr.settings import D_PARTITION, F_PARTITION, GH_PARTITION, RHO_UNIVERSE_POINTS

Quad = Tuple[float, float, float, float]

_PARTITION_KEYS = {
    "D_LOW": "d_low",
    "D_MEDIUM": "d_medium",
    "D_HIGH": "d_high",
    "F_LOW": "f_low",
    "F_HIGH": "f_high",
    "GH_LOW": "gh_low",
    "GH_MEDIUM": "gh_medium",
    "GH_HIGH": "gh_high",
}
_SCALAR_KEYS = {
    "PEAK_MODE": "peak_mode",
    "TIE_BREAK": "tie_break",
    "RULE7_G": "rule7_g",
    "UNIVERSE_POINTS": "universe_points",
}


class FuzzyConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    d_low: Quad = D_PARTITION["low"]
    d_medium: Quad = D_PARTITION["medium"]
    d_high: Quad = D_PARTITION["high"]
    f_low: Quad = F_PARTITION["low"]
    f_high: Quad = F_PARTITION["high"]
    gh_low: Quad = GH_PARTITION["low"]
    gh_medium: Quad = GH_PARTITION["medium"]
    gh_high: Quad = GH_PARTITION["high"]
    peak_mode: Literal["global", "local"] = "global"
    tie_break: Literal["center", "index"] = "center"
    rule7_g: Literal["g_tilde", "g_bar"] = "g_tilde"
    universe_points: int = Field(default=RHO_UNIVERSE_POINTS, ge=11)

    @model_validator(mode="after")
    def _check_partitions(self) -> "FuzzyConfig":
        parts = self.partitions()
        grid = np.linspace(0.0, 1.0, 101)
        for name in ("d", "g_t", "rho"):
            gaps = parts[name].uncovered_points(grid)
            if gaps:
                raise ValueError(f"partition {name} leaves {gaps[:3]} uncovered")
        gaps = parts["f"].uncovered_points(np.arange(0, 65))
        if gaps:
            raise ValueError(f"partition f leaves crossing counts {gaps[:3]} uncovered")
        return self

    def partitions(self) -> Dict[str, FuzzyPartition]:
        gh = {
            "low": Trapezoid(*self.gh_low),
            "medium": Trapezoid(*self.gh_medium),
            "high": Trapezoid(*self.gh_high),
        }
        d = {
            "low": Trapezoid(*self.d_low),
            "medium": Trapezoid(*self.d_medium),
            "high": Trapezoid(*self.d_high),
        }
        f = {"low": Trapezoid(*self.f_low), "high": Trapezoid(*self.f_high)}
        return {
            "d": FuzzyPartition("d", d),
            "f": FuzzyPartition("f", f, (0.0, float("inf"))),
            "g_t": FuzzyPartition("g_t", gh),
            "h_t": FuzzyPartition("h_t", gh),
            "g_bar": FuzzyPartition("g_bar", gh),
            "rho": FuzzyPartition("rho", gh),
        }

    def rule_base(self) -> RuleBase:
        return default_rule_base(self.rule7_g)

    @classmethod
    def from_file(cls, path: str | Path) -> "FuzzyConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"fuzzy config not found: {path}")
        raw = dotenv_values(path)
        unknown = sorted(set(raw) - set(_PARTITION_KEYS) - set(_SCALAR_KEYS))
        if unknown:
            raise ConfigError(f"unknown fuzzy config keys: {', '.join(unknown)}")
        kwargs: Dict[str, object] = {}
        for key, value in raw.items():
            if value is None:
                raise ConfigError(f"fuzzy config key {key} has no value")
            if key in _PARTITION_KEYS:
                parts = [p.strip() for p in value.split(",")]
                if len(parts) != 4:
                    raise ConfigError(f"{key} needs four numbers a,b,c,d, got {value!r}")
                try:
                    kwargs[_PARTITION_KEYS[key]] = tuple(float(p) for p in parts)
                except ValueError as e:
                    raise ConfigError(f"{key}: {e}") from e
            else:
                kwargs[_SCALAR_KEYS[key]] = value.strip()
        try:
            return cls(**kwargs)
        except (ValidationError, ValueError) as e:
            raise ConfigError(f"invalid fuzzy config {path}: {e}") from e
