from __future__ import annotations

import itertools
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bayes_fuzzy_ocr.exceptions import ConfigError
from bayes_fuzzy_ocr.segmentation.config import FuzzyConfig
from bayes_fuzzy_ocr.segmentation.features import compute_features
from bayes_fuzzy_ocr.segmentation.fuzzy import (
    FuzzyPartition,
    RuleBase,
    Trapezoid,
    default_rule_base,
    infer,
    rule_strengths,
)
from bayes_fuzzy_ocr.segmentation.image import GlyphImage
from bayes_fuzzy_ocr.segmentation.segment import score_columns

CONFIG_FILE = Path(__file__).resolve().parents[1] / "configs" / "fuzzy.cfg"

D = {"low": (0, 0, 0.15, 0.35), "medium": (0.2, 0.4, 0.4, 0.6), "high": (0.5, 0.7, 1, 1)}
F = {"low": (0, 0, 2, 4), "high": (2, 4, np.inf, np.inf)}
GH = {"low": (0, 0, 0.2, 0.4), "medium": (0.3, 0.5, 0.5, 0.7), "high": (0.6, 0.8, 1, 1)}

_U = np.linspace(0, 1, 10_000)
_W = np.ones_like(_U)
_W[[0, -1]] = 0.5
_RHO_SETS = {
    name: np.clip(np.minimum((_U - a) / (b - a) if b > a else 1.0, (d - _U) / (d - c) if d > c else 1.0), 0, 1)
    for name, (a, b, c, d) in GH.items()
}


def _mu(x: float, quad) -> float:
    a, b, c, d = quad
    if x < a or x > d:
        return 0.0
    if b <= x <= c:
        return 1.0
    if x < b:
        return (x - a) / (b - a)
    return (d - x) / (d - c)


def _oracle_rho(d: float, f: float, g: float, h: float, rule7: str = "g_tilde") -> float:
    dl, dm, dh = (_mu(d, D[k]) for k in ("low", "medium", "high"))
    fl, fh = _mu(f, F["low"]), _mu(f, F["high"])
    gl, gm, gh = (_mu(g, GH[k]) for k in ("low", "medium", "high"))
    hl, hm, hh = (_mu(h, GH[k]) for k in ("low", "medium", "high"))
    g7_low = gl if rule7 == "g_tilde" else _mu(1 - g, GH["low"])
    fired = [
        ("low", min(dl, 1 - gh, 1 - hh, fl)),
        ("low", min(gl, hl, dm, fl)),
        ("low", min(gl, 1 - dh, 1 - hl, fl)),
        ("medium", min(dl, 1 - gh, 1 - hh, fh)),
        ("medium", min(gl, hl, dm, fh)),
        ("medium", min(gl, 1 - dh, 1 - hl, fh)),
        ("medium", min(hl, 1 - dh, 1 - g7_low, fl)),
        ("medium", min(dm, gm, hm, fl)),
    ]
    fired.append(("high", max(0.0, 1 - max(s for _, s in fired))))
    agg = np.zeros_like(_U)
    for name, s in fired:
        if s > 0:
            agg += np.minimum(s, _RHO_SETS[name])
    area = (_W * agg).sum()
    if area == 0:
        return 1.0
    return float((_W * _U * agg).sum() / area)


def _rho(cfg: FuzzyConfig, d: float, f: float, g: float, h: float) -> float:
    return infer({"d": d, "f": f, "g_t": g, "h_t": h}, cfg.partitions(), cfg.rule_base(), cfg.universe_points)


# ---------------------------------------------------------------- memberships


def test_trapezoid_shapes():
    t = Trapezoid(0.3, 0.5, 0.5, 0.7)
    assert t(0.5) == 1.0 and t(0.3) == 0.0 and t(0.7) == 0.0
    assert t(0.4) == pytest.approx(0.5)
    shoulder = Trapezoid(0.0, 0.0, 0.2, 0.4)
    assert shoulder(0.0) == 1.0 and shoulder(0.3) == pytest.approx(0.5)
    open_right = Trapezoid(2.0, 4.0, np.inf, np.inf)
    assert open_right(3.0) == pytest.approx(0.5) and open_right(64.0) == 1.0
    np.testing.assert_allclose(t(np.array([0.2, 0.4, 0.6])), [0.0, 0.5, 0.5])
    with pytest.raises(ValueError):
        Trapezoid(0.5, 0.4, 0.6, 0.7)


@settings(max_examples=300)
@given(
    quad=st.sampled_from([*D.values(), *F.values(), *GH.values()]),
    x=st.floats(-1.0, 70.0, allow_nan=False),
)
def test_trapezoid_matches_piecewise_definition(quad, x):
    assert Trapezoid(*quad)(x) == pytest.approx(_mu(x, quad), abs=1e-12)


def test_partition_coverage():
    parts = FuzzyConfig().partitions()
    assert parts["g_t"].uncovered_points(np.linspace(0, 1, 101)) == []
    sparse = FuzzyPartition("x", {"low": Trapezoid(0, 0, 0.1, 0.2), "high": Trapezoid(0.8, 0.9, 1, 1)})
    assert 0.5 in sparse.uncovered_points([0.0, 0.5, 1.0])


# ---------------------------------------------------------------- rules


def test_rule_base_shape_is_enforced():
    rules = default_rule_base().rules
    with pytest.raises(ValueError):
        RuleBase(rules[:8])
    with pytest.raises(ValueError):
        RuleBase((rules[3],) + rules[1:])
    with pytest.raises(ValueError):
        RuleBase(rules[:8] + (replace(rules[8], otherwise=False),))


def test_residual_rule_complements_the_strongest():
    cfg = FuzzyConfig()
    s = rule_strengths({"d": 0.0, "f": 0, "g_t": 0.0, "h_t": 0.0}, cfg.partitions(), cfg.rule_base())
    assert s[0] == 1.0 and s[-1] == 0.0
    s = rule_strengths({"d": 1.0, "f": 0, "g_t": 0.0, "h_t": 0.0}, cfg.partitions(), cfg.rule_base())
    assert s[:-1].max() == 0.0 and s[-1] == 1.0


# ---------------------------------------------------------------- inference


def test_centre_valley_with_simple_stroke_scores_low():
    rho = _rho(FuzzyConfig(), d=0.0, f=0, g=0.0, h=0.0)
    assert rho < 0.4
    assert rho == pytest.approx((0.02 + 0.1 * (0.2 + 0.2 / 3)) / 0.3, abs=1e-3)


def test_many_crossings_move_score_to_medium():
    assert _rho(FuzzyConfig(), d=0.0, f=5, g=0.0, h=0.0) == pytest.approx(0.5, abs=1e-9)


def test_edge_column_falls_through_to_residual_rule():
    rho = _rho(FuzzyConfig(), d=1.0, f=0, g=0.0, h=0.0)
    assert rho > 0.6
    assert rho == pytest.approx((0.1 * (0.6 + 0.4 / 3) + 0.2 * 0.9) / 0.3, abs=1e-3)


def test_empty_aggregate_scores_one():
    cfg = FuzzyConfig()
    parts = dict(cfg.partitions())
    off = Trapezoid(2.0, 3.0, 3.0, 4.0)
    parts["rho"] = FuzzyPartition("rho", {"low": off, "medium": off, "high": off})
    assert infer({"d": 0.0, "f": 0, "g_t": 0.0, "h_t": 0.0}, parts, cfg.rule_base()) == 1.0


@settings(max_examples=150)
@given(
    d=st.floats(0, 1),
    f=st.integers(0, 12),
    g=st.floats(0, 1),
    h=st.floats(0, 1),
    rule7=st.sampled_from(["g_tilde", "g_bar"]),
)
def test_inference_matches_fine_grid_oracle(d, f, g, h, rule7):
    cfg = FuzzyConfig(rule7_g=rule7)
    rho = _rho(cfg, d, f, g, h)
    assert 0.0 <= rho <= 1.0
    assert rho == pytest.approx(_oracle_rho(d, f, g, h, rule7), abs=1e-3)


@pytest.mark.parametrize(
    "d,g,h",
    list(itertools.product([0.0, 0.4, 1.0], [0.0, 0.5, 1.0], [0.0, 0.5, 1.0])),
)
def test_more_crossings_never_lower_the_score(d, g, h):
    # memberships are crisp on this grid
    cfg = FuzzyConfig()
    low = max(_rho(cfg, d, f, g, h) for f in (0, 1, 2))
    high = min(_rho(cfg, d, f, g, h) for f in (4, 5, 10))
    assert high >= low - 1e-9


# ---------------------------------------------------------------- config file


def test_shipped_config_equals_defaults():
    assert FuzzyConfig.from_file(CONFIG_FILE) == FuzzyConfig()


def test_config_file_overrides(tmp_path):
    path = tmp_path / "alt.cfg"
    path.write_text("# alt\nPEAK_MODE=local\nTIE_BREAK=index\nRULE7_G=g_bar\nD_LOW=0,0,0.2,0.35\n")
    cfg = FuzzyConfig.from_file(path)
    assert (cfg.peak_mode, cfg.tie_break, cfg.rule7_g) == ("local", "index", "g_bar")
    assert cfg.d_low == (0.0, 0.0, 0.2, 0.35)


@pytest.mark.parametrize(
    "body",
    [
        "FOO=1\n",
        "D_LOW=0,1\n",
        "D_LOW=0,a,1,1\n",
        "PEAK_MODE=nearest\n",
        "UNIVERSE_POINTS=5\n",
        "GH_LOW=0,0,0.1,0.15\n",
        "F_LOW=0,0,1,2\nF_HIGH=5,6,inf,inf\n",
        "D_LOW=0,0.3,0.2,0.4\n",
    ],
)
def test_bad_config_files_raise(tmp_path, body):
    path = tmp_path / "bad.cfg"
    path.write_text(body)
    with pytest.raises(ConfigError):
        FuzzyConfig.from_file(path)


def test_missing_config_file_raises(tmp_path):
    with pytest.raises(ConfigError):
        FuzzyConfig.from_file(tmp_path / "nope.cfg")


@settings(max_examples=500)
@given(arrays(np.uint8, st.tuples(st.integers(1, 10), st.integers(3, 10)), elements=st.integers(0, 1)))
def test_column_scores_match_oracle_on_random_images(pixels):
    img = GlyphImage(pixels)
    scores = score_columns(img)
    feats = compute_features(img)
    for i in range(img.cols):
        if not feats.valid[i]:
            assert scores.rho[i] == 1.0
            continue
        expected = _oracle_rho(feats.d[i], feats.f[i], feats.g_t[i], feats.h_t[i])
        assert scores.rho[i] == pytest.approx(expected, abs=1e-3)
