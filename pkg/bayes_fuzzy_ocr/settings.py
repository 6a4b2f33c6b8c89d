import os
from functools import cache
from typing import Dict, Sequence, Tuple

# -----------------------------
# Training defaults
# -----------------------------

DEFAULT_EPSILON = 0.05
DEFAULT_MAX_EPOCHS = 1000
DEFAULT_ETA = 3.0

# Bayesian initialisation
DEFAULT_BI_ITERATIONS = 2
DEFAULT_OFF_DIAGONAL = 0.7
DEFAULT_PD_FLOOR = 1e-6
DEFAULT_DELTA_SUBSET = 200
DENSE_ORACLE_MAX_DIM = 64

# Soft one-hot targets keep BP gradients alive near saturation.
SOFT_TARGETS: Dict[str, Tuple[float, float]] = {
    # activation: (hot, cold)
    "tanh": (0.9, -0.9),
    "sigmoid": (0.9, 0.1),
}

# Encoded pixel levels per activation: (white, ink)
PIXEL_LEVELS: Dict[str, Tuple[float, float]] = {
    "tanh": (-1.0, 1.0),
    "sigmoid": (0.0, 1.0),
}

# -----------------------------
# Topologies and glyph grids
# -----------------------------

# (rows, cols); 15 columns x 21 rows gives the 315-input printed-symbol layer.
PRINTED_GLYPH_GRID: Tuple[int, int] = (21, 15)
MNIST_GLYPH_GRID: Tuple[int, int] = (28, 28)

TOPOLOGIES: Dict[str, Dict[str, object]] = {
    "printed_symbols": {"layers": (315, 100, 85), "eta": 3.0, "reference_hidden_sizes": True},
    "mnist_L3": {"layers": (784, 100, 10), "eta": 3.0, "reference_hidden_sizes": False},
    # hidden sizes of the five-layer net are harness-chosen
    "mnist_L5": {"layers": (784, 200, 100, 50, 10), "eta": 1.5, "reference_hidden_sizes": False},
}

H_GRID: Tuple[float, ...] = (0.7, 0.8, 0.9, 1.0, 1.1, 1.2)

# Fallback step size by network depth (number of layers) for layouts outside TOPOLOGIES.
DEFAULT_ETA_BY_DEPTH: Dict[int, float] = {3: 3.0, 5: 1.5}


def default_eta(layers: Sequence[int]) -> float:
    """Step size for a layout: its TOPOLOGIES entry, else the depth default, else DEFAULT_ETA."""
    for topo in TOPOLOGIES.values():
        if tuple(layers) == tuple(topo["layers"]):
            return float(topo["eta"])
    return DEFAULT_ETA_BY_DEPTH.get(len(layers), DEFAULT_ETA)


MNIST_DESK_SUBSET = 1000
MNIST_FILES: Dict[str, str] = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}

# -----------------------------
# Fuzzy segmentation catalog
# -----------------------------

# Trapezoids (a, b, c, d): rise a->b, plateau b->c, fall c->d.
D_PARTITION: Dict[str, Tuple[float, float, float, float]] = {
    "low": (0.0, 0.0, 0.15, 0.35),
    "medium": (0.2, 0.4, 0.4, 0.6),
    "high": (0.5, 0.7, 1.0, 1.0),
}

# Shared by g_t, h_t and the output rho.
GH_PARTITION: Dict[str, Tuple[float, float, float, float]] = {
    "low": (0.0, 0.0, 0.2, 0.4),
    "medium": (0.3, 0.5, 0.5, 0.7),
    "high": (0.6, 0.8, 1.0, 1.0),
}

# Crossing counts live on 0..m; high is a right shoulder so it covers any m.
F_PARTITION: Dict[str, Tuple[float, float, float, float]] = {
    "low": (0.0, 0.0, 2.0, 4.0),
    "high": (2.0, 4.0, float("inf"), float("inf")),
}

RHO_UNIVERSE_POINTS = 201
CUT_TOLERANCE = 1

# -----------------------------
# Report formats
# -----------------------------

FLOAT_FORMAT = "%.6g"
INIT_COMPARE_COLUMNS = ("h", "eta", "seed", "init", "steps", "converged", "wall_ms")
INIT_SUMMARY_COLUMNS = ("h", "eta", "init", "runs", "converged", "median_steps", "mean_steps")
SEGMENT_COMPARE_COLUMNS = ("file", "method", "cut", "lo", "hi", "correct", "error")
SEGMENT_SUMMARY_COLUMNS = ("method", "correct", "total", "accuracy")
SCORE_COLUMNS = ("i", "d", "f", "g_t", "h_t", "rho", "valid")
CORPUS_MANIFEST = "manifest.csv"
CORPUS_MANIFEST_COLUMNS = ("file", "lo", "hi", "left_label", "right_label")
LABELED_MANIFEST_COLUMNS = ("file", "label")


@cache
def get_worker_count() -> int:
    """
    Worker pool size for sweeps, from BFOCR_WORKERS.
    Defaults to every available core.
    """
    raw = os.getenv("BFOCR_WORKERS")
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as e:
        raise RuntimeError(f"BFOCR_WORKERS must be an integer, got {raw!r}") from e
    return max(1, value)


@cache
def get_log_level() -> str:
    return os.getenv("BFOCR_LOG_LEVEL", "INFO").upper()


def get_mnist_dir() -> str | None:
    return os.getenv("BFOCR_MNIST_DIR") or None
