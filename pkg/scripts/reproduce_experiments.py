# scripts/reproduce_experiments.py
from __future__ import annotations

from pathlib import Path

from dotenv import find_dotenv, load_dotenv

load_dotenv(find_dotenv(usecwd=True))

# Wire the registries explicitly (NO side-effects at import time)
from bayes_fuzzy_ocr.bench.registry import CUT_METHODS, INITIALIZERS, register_all

register_all()

from bayes_fuzzy_ocr.bench.experiments import (
    ExperimentConfig,
    run_init_compare,
    run_segment_compare,
)
from bayes_fuzzy_ocr.datasets.corpus import generate_touching_corpus, write_corpus
from bayes_fuzzy_ocr.datasets.idx import load_mnist
from bayes_fuzzy_ocr.logconf import logger
from bayes_fuzzy_ocr.settings import (
    MNIST_DESK_SUBSET,
    MNIST_FILES,
    TOPOLOGIES,
    get_mnist_dir,
)

_REQUIRED_INITIALIZERS = ("random", "bayes")
_REQUIRED_CUT_METHODS = ("fuzzy", "g_only", "h_only")

RESULTS_DIR = Path("results")


def _assert_registry_wired() -> None:
    missing: list[str] = []

    for name in _REQUIRED_INITIALIZERS:
        if name not in INITIALIZERS.all_names():
            missing.append(f"INITIALIZERS missing: {name}")

    for name in _REQUIRED_CUT_METHODS:
        if name not in CUT_METHODS.all_names():
            missing.append(f"CUT_METHODS missing: {name}")

    if missing:
        raise RuntimeError(
            "Registry is NOT wired (bayes_fuzzy_ocr.bench.registry didn't register what this runner needs):\n"
            + "\n".join(f" - {m}" for m in missing)
        )


def main() -> None:
    _assert_registry_wired()

    root = get_mnist_dir()
    if root is None:
        raise RuntimeError("set BFOCR_MNIST_DIR to the directory holding the four MNIST IDX files")
    mnist = Path(root)

    # ---- Initialisation comparison, both network depths ----
    for name in ("mnist_L3", "mnist_L5"):
        topo = TOPOLOGIES[name]
        cfg = ExperimentConfig(
            mode="init_compare",
            layers=list(topo["layers"]),
            eta=float(topo["eta"]),
            subset=MNIST_DESK_SUBSET,
            data=mnist / MNIST_FILES["train_images"],
            labels=mnist / MNIST_FILES["train_labels"],
        )
        report = run_init_compare(cfg)
        rows_path, _ = report.write(RESULTS_DIR / f"init_compare_{name}.csv")
        logger.info("experiment_written", experiment=name, path=str(rows_path))

    # ---- Segmentation comparison on a seeded synthetic corpus ----
    glyphs = load_mnist(mnist / MNIST_FILES["test_images"], mnist / MNIST_FILES["test_labels"])
    corpus_dir = RESULTS_DIR / "touching_corpus"
    write_corpus(corpus_dir, generate_touching_corpus(glyphs, pairs=100, overlaps=(1, 2), seed=7))
    report = run_segment_compare(ExperimentConfig(mode="segment_compare", corpus=corpus_dir))
    rows_path, _ = report.write(RESULTS_DIR / "segment_compare.csv")
    logger.info("experiment_written", experiment="segment_compare", path=str(rows_path))


if __name__ == "__main__":
    main()
