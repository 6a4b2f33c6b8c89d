"""
Desk-scale reproductions of the two comparisons:

* init-compare: steps-to-convergence of online BP from random vs Bayesian initial weights,
  over an (h, eta, seed) grid.
* segment-compare: cut accuracy of the fuzzy score against the g-only and h-only baselines on
  a touching-pair corpus.

Cells run in a joblib worker pool; rows are merged in (h, eta, seed, init) order before writing so
reports only depend on the configuration.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator

from bayes_fuzzy_ocr.ann.bayes_init import InitConfig
from bayes_fuzzy_ocr.ann.mlp import Mlp, TrainConfig, TrainingSet, TrainReport, accuracy, train
from bayes_fuzzy_ocr.bench.registry import CUT_METHODS, INITIALIZERS, register_all
from bayes_fuzzy_ocr.datasets.corpus import load_labeled_pbm_dir, read_corpus
from bayes_fuzzy_ocr.datasets.glyphs import LabeledGlyph, build_training_set, stratified_subset
from bayes_fuzzy_ocr.datasets.idx import load_mnist
from bayes_fuzzy_ocr.exceptions import (
    BayesFuzzyOcrError,
    ConfigError,
    DimensionMismatchError,
    DivergenceError,
)
from bayes_fuzzy_ocr.logconf import logger
from bayes_fuzzy_ocr.segmentation.config import FuzzyConfig
from bayes_fuzzy_ocr.segmentation.segment import CUT_METHODS as METHOD_ORDER
from bayes_fuzzy_ocr.settings import (
    CUT_TOLERANCE,
    DEFAULT_BI_ITERATIONS,
    DEFAULT_DELTA_SUBSET,
    DEFAULT_EPSILON,
    DEFAULT_ETA,
    DEFAULT_MAX_EPOCHS,
    DEFAULT_OFF_DIAGONAL,
    H_GRID,
    INIT_COMPARE_COLUMNS,
    INIT_SUMMARY_COLUMNS,
    MNIST_GLYPH_GRID,
    PRINTED_GLYPH_GRID,
    SEGMENT_COMPARE_COLUMNS,
    SEGMENT_SUMMARY_COLUMNS,
    TOPOLOGIES,
    default_eta,
    get_worker_count,
)
from bayes_fuzzy_ocr.utils import write_report_csv

Mode = Literal["init_compare", "segment_compare", "train", "segment", "synth"]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: Mode = "init_compare"
    h_grid: List[float] = Field(default_factory=lambda: list(H_GRID), min_length=1)
    eta: float = Field(default=DEFAULT_ETA, gt=0)
    eta_grid: Optional[List[PositiveFloat]] = Field(default=None, min_length=1)
    layers: List[int] = Field(default_factory=lambda: list(TOPOLOGIES["mnist_L3"]["layers"]), min_length=2)
    seeds: List[int] = Field(default_factory=lambda: list(range(10)), min_length=1)
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0)
    max_epochs: int = Field(default=DEFAULT_MAX_EPOCHS, gt=0)
    initializers: List[str] = Field(default_factory=lambda: ["bayes", "random"], min_length=1)
    init: str = "bayes"
    activation: Literal["tanh", "sigmoid"] = "tanh"
    use_bias: bool = True
    bi_iterations: int = Field(default=DEFAULT_BI_ITERATIONS, ge=1)
    off_diag: float = DEFAULT_OFF_DIAGONAL
    delta_subset: int = Field(default=DEFAULT_DELTA_SUBSET, gt=0)
    subset: Optional[int] = Field(default=None, gt=0)
    timing: bool = False
    workers: Optional[int] = Field(default=None, gt=0)

    data: Optional[Path] = None
    labels: Optional[Path] = None
    corpus: Optional[Path] = None
    fuzzy_config: Optional[Path] = None
    out: Optional[Path] = None

    @field_validator("data", "labels", "corpus", "fuzzy_config", "out")
    @classmethod
    def _resolve(cls, v: Optional[Path]) -> Optional[Path]:
        return None if v is None else Path(v).expanduser().resolve()

    @model_validator(mode="before")
    @classmethod
    def _topology_eta(cls, data):
        """An unset eta takes the step size of the configured layout."""
        if isinstance(data, dict) and data.get("eta") is None:
            layers = data.get("layers") or TOPOLOGIES["mnist_L3"]["layers"]
            data = {**data, "eta": default_eta(layers)}
        return data

    @field_validator("layers")
    @classmethod
    def _positive_layers(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError(f"layer sizes must be positive, got {v}")
        return v

    @property
    def etas(self) -> List[float]:
        return list(self.eta_grid) if self.eta_grid else [self.eta]

    @property
    def topology_label(self) -> str:
        for topo in TOPOLOGIES.values():
            if tuple(self.layers) == tuple(topo["layers"]) and topo["reference_hidden_sizes"]:
                return "reference"
        return "custom"

    def init_config(self, h: float, seed: int) -> InitConfig:
        return InitConfig(
            h=h,
            seed=seed,
            iterations=self.bi_iterations,
            off_diag=self.off_diag,
            subset_size=self.delta_subset,
        )

    def train_config(self, seed: int, eta: Optional[float] = None) -> TrainConfig:
        return TrainConfig(
            eta=self.eta if eta is None else eta,
            max_epochs=self.max_epochs,
            epsilon=self.epsilon,
            shuffle_seed=seed,
            weight_seed=seed,
        )


@dataclass(frozen=True)
class RunRecord:
    h: float
    eta: float
    seed: int
    init: str
    steps: int
    converged: bool
    wall_ms: int = 0
    error: str = ""


@dataclass
class SweepReport:
    rows: pd.DataFrame
    summary: pd.DataFrame
    header: List[str] = field(default_factory=list)

    def write(self, out: str | Path) -> Tuple[Path, Path]:
        out = Path(out)
        rows_path = write_report_csv(self.rows, out, header_comments=self.header)
        summary_path = write_report_csv(
            self.summary, summary_path_for(out), header_comments=[f"summary of {out.name}"]
        )
        return rows_path, summary_path


def summary_path_for(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}.summary.csv")


# ======================
# data
# ======================


def glyph_grid(input_size: int, sample_shape: Tuple[int, int]) -> Tuple[int, int]:
    """Encoding grid (rows, cols) whose area matches the network input size."""
    if sample_shape[0] * sample_shape[1] == input_size:
        return sample_shape
    for grid in (PRINTED_GLYPH_GRID, MNIST_GLYPH_GRID):
        if grid[0] * grid[1] == input_size:
            return grid
    side = int(round(np.sqrt(input_size)))
    if side * side == input_size:
        return side, side
    raise DimensionMismatchError(f"no glyph grid has {input_size} pixels")


def load_glyphs(data: Path, labels: Optional[Path]) -> List[LabeledGlyph]:
    """A directory is a labelled PBM set; a file is an IDX image file paired with ``labels``."""
    if data.is_dir():
        return load_labeled_pbm_dir(data)
    if labels is None:
        raise ConfigError("IDX images need a matching labels file")
    return load_mnist(data, labels)


def prepare_training_set(cfg: ExperimentConfig) -> TrainingSet:
    if cfg.data is None:
        raise ConfigError("no training data configured")
    glyphs = load_glyphs(cfg.data, cfg.labels)
    if cfg.subset is not None:
        glyphs = stratified_subset(glyphs, cfg.subset)
    rows, cols = glyph_grid(cfg.layers[0], glyphs[0].image.shape)
    data = build_training_set(glyphs, rows, cols, cfg.activation)
    if data.target_size != cfg.layers[-1]:
        raise DimensionMismatchError(
            f"{data.target_size} classes but the output layer has {cfg.layers[-1]} units"
        )
    logger.info("training_set_ready", items=len(data), grid=f"{rows}x{cols}", classes=data.target_size)
    return data


# ======================
# init-compare
# ======================


def initialize(cfg: ExperimentConfig, data: TrainingSet, init: str, h: float, seed: int) -> Mlp:
    register_all()
    fn = INITIALIZERS.get(init)
    return fn(cfg.layers, data, cfg.init_config(h, seed), cfg.activation, cfg.use_bias)


def _run_cell(cfg: ExperimentConfig, data: TrainingSet, h: float, eta: float, seed: int, init: str) -> RunRecord:
    start = time.perf_counter()
    error = ""
    try:
        net = initialize(cfg, data, init, h, seed)
        report = train(net, data, cfg.train_config(seed, eta))
        steps, converged = report.steps, report.converged
    except DivergenceError as e:
        logger.warning("cell_diverged", h=h, eta=eta, seed=seed, init=init, epoch=e.epoch)
        steps, converged, error = cfg.max_epochs, False, f"{type(e).__name__}: {e}"
    except BayesFuzzyOcrError as e:
        logger.warning("cell_failed", h=h, eta=eta, seed=seed, init=init, error=str(e))
        steps, converged, error = cfg.max_epochs, False, f"{type(e).__name__}: {e}"
    wall_ms = int(round((time.perf_counter() - start) * 1000)) if cfg.timing else 0
    logger.debug("cell_done", h=h, eta=eta, seed=seed, init=init, steps=steps, converged=converged)
    return RunRecord(h, eta, seed, init, steps, converged, wall_ms, error)


def sweep_cells(cfg: ExperimentConfig) -> List[Tuple[float, float, int, str]]:
    return sorted(
        (h, eta, seed, init)
        for h in cfg.h_grid
        for eta in cfg.etas
        for seed in cfg.seeds
        for init in cfg.initializers
    )


def summarize_init(rows: pd.DataFrame) -> pd.DataFrame:
    summary = (
        rows.groupby(["h", "eta", "init"], sort=True)
        .agg(
            runs=("steps", "size"),
            converged=("converged", "sum"),
            median_steps=("steps", "median"),
            mean_steps=("steps", "mean"),
        )
        .reset_index()
    )
    summary["converged"] = summary["converged"].astype(int)
    return summary[list(INIT_SUMMARY_COLUMNS)]


def _init_header(cfg: ExperimentConfig) -> List[str]:
    return [
        "mode=init_compare",
        f"layers={','.join(str(n) for n in cfg.layers)}",
        f"topology={cfg.topology_label}",
        f"activation={cfg.activation} bias={str(cfg.use_bias).lower()}",
        f"eta_grid={','.join(f'{e:g}' for e in cfg.etas)} epsilon={cfg.epsilon:g} max_epochs={cfg.max_epochs}",
        f"h_grid={','.join(f'{h:g}' for h in cfg.h_grid)}",
        f"seeds={','.join(str(s) for s in cfg.seeds)}",
        f"bi_iterations={cfg.bi_iterations} off_diag={cfg.off_diag:g} delta_subset={cfg.delta_subset}",
        f"data={cfg.data.name if cfg.data else ''} subset={cfg.subset or 'all'}",
    ]


def run_init_compare(cfg: ExperimentConfig, data: Optional[TrainingSet] = None) -> SweepReport:
    register_all()
    for init in cfg.initializers:
        INITIALIZERS.get(init)
    data = data if data is not None else prepare_training_set(cfg)
    cells = sweep_cells(cfg)
    n_jobs = min(cfg.workers or get_worker_count(), len(cells))
    logger.info("init_compare_start", cells=len(cells), workers=n_jobs, etas=cfg.etas)

    records = Parallel(n_jobs=n_jobs)(
        delayed(_run_cell)(cfg, data, h, eta, seed, init) for h, eta, seed, init in cells
    )
    records = sorted(records, key=lambda r: (r.h, r.eta, r.seed, r.init))
    rows = pd.DataFrame([asdict(r) for r in records])[list(INIT_COMPARE_COLUMNS)]
    rows["converged"] = rows["converged"].astype(bool)
    return SweepReport(rows=rows, summary=summarize_init(rows), header=_init_header(cfg))


def run_train(cfg: ExperimentConfig, data: Optional[TrainingSet] = None) -> Tuple[Mlp, TrainReport]:
    """Single training run with ``cfg.init`` at the first h and first seed."""
    data = data if data is not None else prepare_training_set(cfg)
    h, seed = cfg.h_grid[0], cfg.seeds[0]
    net = initialize(cfg, data, cfg.init, h, seed)
    report = train(net, data, cfg.train_config(seed))
    report.train_accuracy = accuracy(net, data)
    logger.info("train_accuracy", accuracy=report.train_accuracy, items=len(data))
    return net, report


# ======================
# segment-compare
# ======================


def summarize_segment(rows: pd.DataFrame, methods: Sequence[str]) -> pd.DataFrame:
    out = []
    for method in methods:
        sel = rows[rows["method"] == method]
        correct = int(sel["correct"].sum())
        total = len(sel)
        out.append((method, correct, total, correct / total if total else 0.0))
    return pd.DataFrame(out, columns=list(SEGMENT_SUMMARY_COLUMNS))


def run_segment_compare(
    cfg: ExperimentConfig,
    methods: Sequence[str] = METHOD_ORDER,
) -> SweepReport:
    """
    Cut every corpus pair with each method. A cut is correct within ``CUT_TOLERANCE`` columns of
    the truth range; unreadable samples and methods that cannot cut become failed rows.
    """
    if cfg.corpus is None:
        raise ConfigError("no corpus configured")
    register_all()
    cutters = {m: CUT_METHODS.get(m) for m in methods}
    fuzzy_cfg = FuzzyConfig.from_file(cfg.fuzzy_config) if cfg.fuzzy_config else FuzzyConfig()
    entries = read_corpus(cfg.corpus)
    logger.info("segment_compare_start", samples=len(entries), methods=list(methods))

    rows = []
    for entry in entries:
        for method in methods:
            if not entry.ok:
                rows.append((entry.file, method, None, None, None, False, entry.error))
                continue
            lo, hi = entry.pair.truth_range
            try:
                cut = int(cutters[method](entry.pair.image, config=fuzzy_cfg))
            except BayesFuzzyOcrError as e:
                logger.warning("cut_failed", file=entry.file, method=method, error=str(e))
                rows.append((entry.file, method, None, lo, hi, False, f"{type(e).__name__}: {e}"))
                continue
            correct = entry.pair.is_correct(cut, CUT_TOLERANCE)
            rows.append((entry.file, method, cut, lo, hi, correct, ""))

    df = pd.DataFrame(rows, columns=list(SEGMENT_COMPARE_COLUMNS))
    for col in ("cut", "lo", "hi"):
        df[col] = df[col].astype("Int64")
    df["correct"] = df["correct"].astype(bool)
    header = [
        "mode=segment_compare",
        f"corpus={cfg.corpus.name}",
        f"tolerance={CUT_TOLERANCE}",
        f"peak_mode={fuzzy_cfg.peak_mode} tie_break={fuzzy_cfg.tie_break} rule7_g={fuzzy_cfg.rule7_g}",
    ]
    return SweepReport(rows=df, summary=summarize_segment(df, methods), header=header)
