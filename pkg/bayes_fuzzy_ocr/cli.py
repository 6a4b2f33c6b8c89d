"""
bfocr command line.

    bfocr train                 --data ... --labels ... --layers 784,100,10 --init bayes --out model.bfmlp
    bfocr bench init-compare    --data ... --labels ... --h-grid 0.7:1.2:0.1 --seeds 10 --out runs.csv
    bfocr bench segment-compare --data corpus/ --out segment.csv
    bfocr segment               --input pair.pbm --emit-scores scores.csv
    bfocr synth touching        --pairs 100 --overlap 0:2 --seed 7 --out corpus/

Library errors end the command with one stderr line ``error: <Class>: <message>`` and exit
code 1; usage errors (unknown flag, missing path, malformed grid, out-of-range value) exit with
code 2.
"""

from __future__ import annotations

import functools
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
import pandas as pd
import typer
from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from bayes_fuzzy_ocr.ann.serialization import save_mlp
from bayes_fuzzy_ocr.bench.experiments import (
    ExperimentConfig,
    load_glyphs,
    run_init_compare,
    run_segment_compare,
    run_train,
)
from bayes_fuzzy_ocr.datasets.corpus import generate_touching_corpus, write_corpus
from bayes_fuzzy_ocr.datasets.netpbm import load_netpbm, write_pbm
from bayes_fuzzy_ocr.exceptions import BayesFuzzyOcrError, ConfigError
from bayes_fuzzy_ocr.logconf import logger
from bayes_fuzzy_ocr.segmentation.config import FuzzyConfig
from bayes_fuzzy_ocr.segmentation.segment import score_columns, score_rows, segment as segment_image
from bayes_fuzzy_ocr.settings import (
    DEFAULT_EPSILON,
    DEFAULT_MAX_EPOCHS,
    MNIST_FILES,
    get_mnist_dir,
)
from bayes_fuzzy_ocr.utils import (
    parse_float_grid,
    parse_int_list,
    parse_int_range,
    parse_seeds,
    write_report_csv,
)

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Bayesian-initialised MLP and fuzzy segmentation harness.")
bench_app = typer.Typer(no_args_is_help=True, help="Reproduce the initialisation and segmentation comparisons.")
synth_app = typer.Typer(no_args_is_help=True, help="Generate synthetic corpora.")
app.add_typer(bench_app, name="bench")
app.add_typer(synth_app, name="synth")


@app.callback()
def _main() -> None:
    load_dotenv(find_dotenv(usecwd=True))


def _guarded(fn: Callable) -> Callable:
    """Invalid option values exit as usage errors; library failures print one error line."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            raise typer.BadParameter(f"{where}: {first['msg']}") from None
        except (BayesFuzzyOcrError, ValueError, OSError) as e:
            message = " ".join(str(e).split())
            typer.echo(f"error: {type(e).__name__}: {message}", err=True)
            raise typer.Exit(code=1) from None

    return wrapper


def _parsed(parser: Callable, value: str, flag: str):
    try:
        return parser(value)
    except ConfigError as e:
        raise typer.BadParameter(str(e), param_hint=flag) from None


def _mnist_default(key: str) -> Optional[Path]:
    root = get_mnist_dir()
    return Path(root) / MNIST_FILES[key] if root else None


# ======================
# train
# ======================


@app.command()
@_guarded
def train(
    data: Optional[Path] = typer.Option(None, "--data", exists=True, help="IDX images or a labelled PBM directory."),
    labels: Optional[Path] = typer.Option(None, "--labels", exists=True, help="IDX labels (with IDX images)."),
    layers: str = typer.Option("784,100,10", "--layers"),
    init: str = typer.Option("bayes", "--init", help="random | bayes"),
    h: float = typer.Option(1.0, "--h"),
    seed: int = typer.Option(0, "--seed"),
    eta: Optional[float] = typer.Option(None, "--eta", help="Step size; defaults to the layout's own."),
    eps: float = typer.Option(DEFAULT_EPSILON, "--eps"),
    max_epochs: int = typer.Option(DEFAULT_MAX_EPOCHS, "--max-epochs"),
    subset: Optional[int] = typer.Option(None, "--subset", help="Stratified truncation of the training set."),
    activation: str = typer.Option("tanh", "--activation"),
    bias: bool = typer.Option(True, "--bias/--no-bias"),
    out: Path = typer.Option(..., "--out", help="Where to save the trained model."),
    mse_out: Optional[Path] = typer.Option(None, "--mse-out", help="Optional CSV of the per-epoch MSE."),
) -> None:
    """Initialise and train one network."""
    data = data or _mnist_default("train_images")
    labels = labels or (_mnist_default("train_labels") if data and not data.is_dir() else None)
    cfg = ExperimentConfig(
        mode="train",
        layers=_parsed(parse_int_list, layers, "--layers"),
        init=init,
        h_grid=[h],
        seeds=[seed],
        eta=eta,
        epsilon=eps,
        max_epochs=max_epochs,
        subset=subset,
        activation=activation,
        use_bias=bias,
        data=data,
        labels=labels,
        out=out,
    )
    logger.info("command_start", command="train", init=init, layers=cfg.layers)
    net, report = run_train(cfg)
    save_mlp(net, out)
    if mse_out is not None:
        trajectory = pd.DataFrame(
            {"epoch": np.arange(1, report.steps + 1), "mse": report.mse_trajectory}
        )
        write_report_csv(trajectory, mse_out, header_comments=[f"init={init} h={h:g} seed={seed}"])
    typer.echo(
        f"steps={report.steps} converged={str(report.converged).lower()} "
        f"final_mse={report.final_mse:.6g} accuracy={report.train_accuracy:.4f}"
    )


# ======================
# bench
# ======================


@bench_app.command("init-compare")
@_guarded
def init_compare(
    data: Optional[Path] = typer.Option(None, "--data", exists=True),
    labels: Optional[Path] = typer.Option(None, "--labels", exists=True),
    layers: str = typer.Option("784,100,10", "--layers"),
    h_grid: str = typer.Option("0.7:1.2:0.1", "--h-grid"),
    seeds: str = typer.Option("10", "--seeds", help="A count n (seeds 0..n-1) or a comma list."),
    init: Optional[List[str]] = typer.Option(None, "--init", help="Repeat to pick initialisers; default both."),
    eta: Optional[float] = typer.Option(None, "--eta", help="Step size; defaults to the layout's own."),
    eta_grid: Optional[str] = typer.Option(None, "--eta-grid", help="Sweep step sizes, e.g. 1.5,3 or 1:3:0.5."),
    eps: float = typer.Option(DEFAULT_EPSILON, "--eps"),
    max_epochs: int = typer.Option(DEFAULT_MAX_EPOCHS, "--max-epochs"),
    subset: Optional[int] = typer.Option(None, "--subset"),
    activation: str = typer.Option("tanh", "--activation"),
    bias: bool = typer.Option(True, "--bias/--no-bias"),
    workers: Optional[int] = typer.Option(None, "--workers"),
    timing: bool = typer.Option(False, "--timing", help="Record wall_ms (otherwise 0)."),
    out: Path = typer.Option(..., "--out"),
) -> None:
    """Steps to convergence from random vs Bayesian initial weights."""
    data = data or _mnist_default("train_images")
    labels = labels or (_mnist_default("train_labels") if data and not data.is_dir() else None)
    cfg = ExperimentConfig(
        mode="init_compare",
        layers=_parsed(parse_int_list, layers, "--layers"),
        h_grid=_parsed(parse_float_grid, h_grid, "--h-grid"),
        seeds=_parsed(parse_seeds, seeds, "--seeds"),
        initializers=sorted(set(init)) if init else ["bayes", "random"],
        eta=eta,
        eta_grid=_parsed(parse_float_grid, eta_grid, "--eta-grid") if eta_grid else None,
        epsilon=eps,
        max_epochs=max_epochs,
        subset=subset,
        activation=activation,
        use_bias=bias,
        workers=workers,
        timing=timing,
        data=data,
        labels=labels,
        out=out,
    )
    logger.info("command_start", command="bench init-compare", cells=len(cfg.h_grid) * len(cfg.etas) * len(cfg.seeds) * len(cfg.initializers))
    report = run_init_compare(cfg)
    rows_path, summary_path = report.write(out)
    typer.echo(report.summary.to_string(index=False))
    typer.echo(f"wrote {rows_path} and {summary_path}")


@bench_app.command("segment-compare")
@_guarded
def segment_compare(
    data: Path = typer.Option(..., "--data", exists=True, file_okay=False, help="Corpus directory with manifest.csv."),
    config: Optional[Path] = typer.Option(None, "--config", exists=True, dir_okay=False),
    out: Path = typer.Option(..., "--out"),
) -> None:
    """Cut accuracy of fuzzy vs g-only vs h-only on a touching-pair corpus."""
    cfg = ExperimentConfig(mode="segment_compare", corpus=data, fuzzy_config=config, out=out)
    logger.info("command_start", command="bench segment-compare", corpus=str(data))
    report = run_segment_compare(cfg)
    rows_path, summary_path = report.write(out)
    typer.echo(report.summary.to_string(index=False))
    typer.echo(f"wrote {rows_path} and {summary_path}")


# ======================
# segment
# ======================


@app.command()
@_guarded
def segment(
    input: Path = typer.Option(..., "--input", exists=True, dir_okay=False, help="PBM or PGM pattern."),
    emit_scores: Optional[Path] = typer.Option(None, "--emit-scores"),
    max_chars: int = typer.Option(2, "--max-chars", min=1),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="Write every piece as PBM."),
    config: Optional[Path] = typer.Option(None, "--config", exists=True, dir_okay=False),
    axis: str = typer.Option("columns", "--axis", help="columns | rows"),
) -> None:
    """Cut a pattern into at most --max-chars pieces and report the cut positions."""
    if axis not in ("columns", "rows"):
        raise typer.BadParameter(f"axis must be columns or rows, got {axis!r}", param_hint="--axis")
    fuzzy_cfg = FuzzyConfig.from_file(config) if config else FuzzyConfig()
    img = load_netpbm(input)
    logger.info("command_start", command="segment", input=str(input), shape=img.shape, axis=axis)

    if emit_scores is not None:
        scores = score_rows(img, fuzzy_cfg) if axis == "rows" else score_columns(img, fuzzy_cfg)
        write_report_csv(scores.to_frame(), emit_scores, header_comments=[f"input={input.name} axis={axis}"])

    pieces = segment_image(img, max_chars, fuzzy_cfg, axis)  # type: ignore[arg-type]
    sizes = [p.rows if axis == "rows" else p.cols for p in pieces]
    cuts = np.cumsum(sizes)[:-1].tolist()
    if out_dir is not None:
        for k, piece in enumerate(pieces):
            write_pbm(piece, out_dir / f"{input.stem}_{k:02d}.pbm")
    typer.echo(f"cuts={','.join(str(c) for c in cuts)} pieces={len(pieces)}")


# ======================
# synth
# ======================


@synth_app.command("touching")
@_guarded
def synth_touching_corpus(
    data: Optional[Path] = typer.Option(None, "--data", exists=True, help="IDX images or a labelled PBM directory."),
    labels: Optional[Path] = typer.Option(None, "--labels", exists=True),
    pairs: int = typer.Option(100, "--pairs", min=1),
    overlap: str = typer.Option("1:2", "--overlap", help="lo:hi inclusive or a single value."),
    seed: int = typer.Option(0, "--seed"),
    pool: Optional[int] = typer.Option(None, "--pool", help="Use only the first N source glyphs."),
    out: Path = typer.Option(..., "--out", file_okay=False),
) -> None:
    """Compose touching pairs from source glyphs and write PBM files plus manifest.csv."""
    data = data or _mnist_default("test_images")
    labels = labels or (_mnist_default("test_labels") if data and not data.is_dir() else None)
    if data is None:
        raise ConfigError("no glyph source: pass --data or set BFOCR_MNIST_DIR")
    overlaps = _parsed(parse_int_range, overlap, "--overlap")
    glyphs = load_glyphs(data, labels)
    if pool is not None:
        glyphs = glyphs[:pool]
    logger.info("command_start", command="synth touching", pairs=pairs, overlaps=overlaps, seed=seed)
    corpus = generate_touching_corpus(glyphs, pairs, overlaps, seed)
    manifest = write_corpus(out, corpus)
    typer.echo(f"wrote {len(corpus)} pairs to {manifest.parent}")


if __name__ == "__main__":
    app()
