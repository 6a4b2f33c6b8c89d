"""
Mamdani inference for the cut score rho.

Antecedents use min for conjunction and 1 - mu for negation, each rule clips its consequent
set with min, the clipped sets are composed by pointwise sum, and rho is the centroid of the
aggregate on a uniform grid of [0, 1]. Rule 9 ("otherwise") fires at 1 - max(rules 1..8).
Membership curves (trapmf) and the centroid (defuzz) come from scikit-fuzzy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np
import skfuzzy as fuzz

from bayes_fuzzy_ocr.settings import RHO_UNIVERSE_POINTS

# Feature keys understood by the engine; g_bar is 1 - g_t.
FEATURES: Tuple[str, ...] = ("d", "f", "g_t", "h_t", "g_bar")


@dataclass(frozen=True)
class Trapezoid:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c <= self.d:
            raise ValueError(f"trapezoid needs a <= b <= c <= d, got {self.params}")

    @property
    def params(self) -> Tuple[float, float, float, float]:
        return self.a, self.b, self.c, self.d

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        mu = fuzz.trapmf(x.ravel(), list(self.params)).reshape(x.shape)
        return float(mu[0]) if scalar else mu


@dataclass(frozen=True)
class FuzzyPartition:
    name: str
    sets: Mapping[str, Trapezoid]
    universe: Tuple[float, float] = (0.0, 1.0)

    def membership(self, fuzzy_set: str, value: float) -> float:
        return self.sets[fuzzy_set](value)

    def uncovered_points(self, points: Sequence[float]) -> list[float]:
        """Universe points where no set has positive membership."""
        pts = np.asarray(points, dtype=float)
        covered = np.zeros(pts.shape, dtype=bool)
        for mf in self.sets.values():
            covered |= mf(pts) > 0
        return pts[~covered].tolist()


@dataclass(frozen=True)
class Antecedent:
    feature: str
    fuzzy_set: str
    negated: bool = False


@dataclass(frozen=True)
class Rule:
    antecedents: Tuple[Antecedent, ...]
    consequent: str
    otherwise: bool = False


@dataclass(frozen=True)
class RuleBase:
    rules: Tuple[Rule, ...]

    def __post_init__(self):
        if len(self.rules) != 9:
            raise ValueError(f"the rule base has exactly 9 rules, got {len(self.rules)}")
        expected = ["low"] * 3 + ["medium"] * 5 + ["high"]
        if [r.consequent for r in self.rules] != expected:
            raise ValueError("rules 1-3 conclude low, 4-8 medium, 9 high")
        if not self.rules[-1].otherwise or any(r.otherwise for r in self.rules[:-1]):
            raise ValueError("only rule 9 is the residual rule")


def _is(feature: str, fuzzy_set: str) -> Antecedent:
    return Antecedent(feature, fuzzy_set)


def _not(feature: str, fuzzy_set: str) -> Antecedent:
    return Antecedent(feature, fuzzy_set, negated=True)


def default_rule_base(rule7_g: str = "g_tilde") -> RuleBase:
    """
    The nine cut rules. Rule 7 reads plain g; ``rule7_g`` selects whether that is taken as
    g_t (default) or as the normalized g_bar.
    """
    g7 = "g_t" if rule7_g == "g_tilde" else "g_bar"
    return RuleBase(
        (
            Rule((_is("d", "low"), _not("g_t", "high"), _not("h_t", "high"), _is("f", "low")), "low"),
            Rule((_is("g_t", "low"), _is("h_t", "low"), _is("d", "medium"), _is("f", "low")), "low"),
            Rule((_is("g_t", "low"), _not("d", "high"), _not("h_t", "low"), _is("f", "low")), "low"),
            Rule((_is("d", "low"), _not("g_t", "high"), _not("h_t", "high"), _is("f", "high")), "medium"),
            Rule((_is("g_t", "low"), _is("h_t", "low"), _is("d", "medium"), _is("f", "high")), "medium"),
            Rule((_is("g_t", "low"), _not("d", "high"), _not("h_t", "low"), _is("f", "high")), "medium"),
            Rule((_is("h_t", "low"), _not("d", "high"), _not(g7, "low"), _is("f", "low")), "medium"),
            Rule((_is("d", "medium"), _is("g_t", "medium"), _is("h_t", "medium"), _is("f", "low")), "medium"),
            Rule((), "high", otherwise=True),
        )
    )


def rule_strengths(
    features: Mapping[str, float],
    partitions: Mapping[str, FuzzyPartition],
    rules: RuleBase,
) -> np.ndarray:
    values: Dict[str, float] = dict(features)
    values.setdefault("g_bar", 1.0 - values["g_t"])
    strengths = []
    for rule in rules.rules[:-1]:
        degrees = []
        for ant in rule.antecedents:
            mu = partitions[ant.feature].membership(ant.fuzzy_set, values[ant.feature])
            degrees.append(1.0 - mu if ant.negated else mu)
        strengths.append(min(degrees))
    strengths.append(max(0.0, 1.0 - max(strengths)))
    return np.asarray(strengths)


def infer(
    features: Mapping[str, float],
    partitions: Mapping[str, FuzzyPartition],
    rules: RuleBase,
    universe_points: int = RHO_UNIVERSE_POINTS,
) -> float:
    """Crisp rho in [0, 1] for one column; 1.0 when nothing fires."""
    strengths = rule_strengths(features, partitions, rules)
    u = np.linspace(0.0, 1.0, universe_points)
    rho_sets = partitions["rho"].sets
    aggregate = np.zeros_like(u)
    for rule, s in zip(rules.rules, strengths):
        if s > 0:
            aggregate += np.minimum(s, rho_sets[rule.consequent](u))
    if not aggregate.any():
        return 1.0
    return float(np.clip(fuzz.defuzz(u, aggregate, "centroid"), 0.0, 1.0))
