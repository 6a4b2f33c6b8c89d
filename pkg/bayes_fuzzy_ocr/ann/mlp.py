"""
Multilayer perceptron with online backpropagation.

Layers are numbered 1..L. ``weights[k - 2]`` holds w^(k), shape (N(k), N(k-1)), and maps
the activations of layer k-1 onto layer k. The input layer applies the activation to the raw
input: a^(1) = f(x). Per-sample loss is 0.5 * ||a^(L) - y||^2, so the delta recursion below is
its exact gradient.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from bayes_fuzzy_ocr.exceptions import DimensionMismatchError, DivergenceError
from bayes_fuzzy_ocr.logconf import logger
from bayes_fuzzy_ocr.settings import DEFAULT_EPSILON, DEFAULT_MAX_EPOCHS

Activation = Literal["tanh", "sigmoid"]
ACTIVATIONS: tuple[str, ...] = ("tanh", "sigmoid")

# Admissible target ranges per activation.
TARGET_RANGES = {"tanh": (-1.0, 1.0), "sigmoid": (0.0, 1.0)}


def activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "tanh":
        return np.tanh(z)
    return expit(z)


def activation_derivative(a: np.ndarray, kind: str) -> np.ndarray:
    """f' evaluated from the activation value itself."""
    if kind == "tanh":
        return 1.0 - a * a
    return a * (1.0 - a)


# -------------------------
# network state
# -------------------------


@dataclass
class Mlp:
    layer_sizes: tuple[int, ...]
    weights: List[np.ndarray]
    activation: str = "tanh"
    biases: Optional[List[np.ndarray]] = None

    def __post_init__(self):
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        if len(self.layer_sizes) < 2:
            raise DimensionMismatchError("an Mlp needs at least two layers")
        if any(n < 1 for n in self.layer_sizes):
            raise DimensionMismatchError(f"layer sizes must be positive: {self.layer_sizes}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if len(self.weights) != len(self.layer_sizes) - 1:
            raise DimensionMismatchError(
                f"expected {len(self.layer_sizes) - 1} weight matrices, got {len(self.weights)}"
            )
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        for k, w in enumerate(self.weights):
            expected = (self.layer_sizes[k + 1], self.layer_sizes[k])
            if w.shape != expected:
                raise DimensionMismatchError(
                    f"layer {k + 2} weights have shape {w.shape}, expected {expected}"
                )
            if not np.all(np.isfinite(w)):
                raise ValueError(f"layer {k + 2} weights contain non-finite values")
        if self.biases is not None:
            self.biases = [np.asarray(b, dtype=float) for b in self.biases]
            if [b.shape for b in self.biases] != [(n,) for n in self.layer_sizes[1:]]:
                raise DimensionMismatchError("bias vectors do not match layer sizes")

    @classmethod
    def zeros(
        cls, layer_sizes: Sequence[int], activation: str = "tanh", use_bias: bool = True
    ) -> "Mlp":
        sizes = tuple(int(n) for n in layer_sizes)
        weights = [np.zeros((sizes[k + 1], sizes[k])) for k in range(len(sizes) - 1)]
        biases = [np.zeros(n) for n in sizes[1:]] if use_bias else None
        return cls(sizes, weights, activation, biases)

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def use_bias(self) -> bool:
        return self.biases is not None

    def layer_weights(self, k: int) -> np.ndarray:
        """w^(k) for 2 <= k <= L."""
        if not 2 <= k <= self.n_layers:
            raise DimensionMismatchError(f"layer index {k} outside 2..{self.n_layers}")
        return self.weights[k - 2]

    def copy(self) -> "Mlp":
        return copy.deepcopy(self)


@dataclass
class TrainingSet:
    inputs: np.ndarray
    targets: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.targets = np.atleast_2d(np.asarray(self.targets, dtype=float))
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise DimensionMismatchError(
                f"{self.inputs.shape[0]} inputs but {self.targets.shape[0]} targets"
            )
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if len(self.labels) != len(self.inputs):
                raise DimensionMismatchError("labels do not match the number of items")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def input_size(self) -> int:
        return self.inputs.shape[1]

    @property
    def target_size(self) -> int:
        return self.targets.shape[1]

    def head(self, n: int) -> "TrainingSet":
        labels = None if self.labels is None else self.labels[:n]
        return TrainingSet(self.inputs[:n], self.targets[:n], labels)

    def check_targets(self, activation: str) -> None:
        lo, hi = TARGET_RANGES[activation]
        if self.targets.size and (self.targets.min() < lo or self.targets.max() > hi):
            raise ValueError(f"targets fall outside [{lo}, {hi}] required by {activation}")


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: float = Field(gt=0)
    max_epochs: int = Field(default=DEFAULT_MAX_EPOCHS, gt=0)
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0)
    shuffle_seed: int = 0
    weight_seed: int = 0


@dataclass
class LayerDeltas:
    """deltas[k - 2] is d^(k) for k = 2..L."""

    deltas: List[np.ndarray]

    def layer(self, k: int) -> np.ndarray:
        return self.deltas[k - 2]


@dataclass
class Gradient:
    weights: List[np.ndarray]
    biases: Optional[List[np.ndarray]] = None


@dataclass
class TrainReport:
    steps: int
    converged: bool
    mse_trajectory: List[float] = field(default_factory=list)
    train_accuracy: Optional[float] = None

    @property
    def final_mse(self) -> float:
        return self.mse_trajectory[-1] if self.mse_trajectory else float("nan")


# -------------------------
# forward / backward
# -------------------------


def _check_input(net: Mlp, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != net.layer_sizes[0]:
        raise DimensionMismatchError(
            f"input of shape {x.shape} does not match N(1)={net.layer_sizes[0]}"
        )
    return x


def _check_target(net: Mlp, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != net.layer_sizes[-1]:
        raise DimensionMismatchError(
            f"target of shape {y.shape} does not match N(L)={net.layer_sizes[-1]}"
        )
    return y


def forward(net: Mlp, x: np.ndarray) -> List[np.ndarray]:
    """Activations a^(1..L) for one input; returned list is 0-based."""
    x = _check_input(net, x)
    acts = [activate(x, net.activation)]
    for k, w in enumerate(net.weights):
        z = w @ acts[-1]
        if net.biases is not None:
            z = z + net.biases[k]
        acts.append(activate(z, net.activation))
    return acts


def forward_batch(net: Mlp, inputs: np.ndarray) -> np.ndarray:
    """Output-layer activations for a batch of inputs, one row per input."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[1] != net.layer_sizes[0]:
        raise DimensionMismatchError(
            f"inputs have {inputs.shape[1]} columns, N(1)={net.layer_sizes[0]}"
        )
    a = activate(inputs, net.activation)
    for k, w in enumerate(net.weights):
        z = a @ w.T
        if net.biases is not None:
            z = z + net.biases[k]
        a = activate(z, net.activation)
    return a


def backward(net: Mlp, x: np.ndarray, y: np.ndarray) -> tuple[LayerDeltas, Gradient]:
    x = _check_input(net, x)
    y = _check_target(net, y)
    acts = forward(net, x)
    n_w = len(net.weights)
    deltas: List[np.ndarray] = [np.empty(0)] * n_w

    d = (acts[-1] - y) * activation_derivative(acts[-1], net.activation)
    deltas[-1] = d
    for j in range(n_w - 1, 0, -1):
        d = (net.weights[j].T @ d) * activation_derivative(acts[j], net.activation)
        deltas[j - 1] = d

    grad_w = [np.outer(deltas[j], acts[j]) for j in range(n_w)]
    grad_b = [dj.copy() for dj in deltas] if net.biases is not None else None
    return LayerDeltas(deltas), Gradient(grad_w, grad_b)


def sample_loss(net: Mlp, x: np.ndarray, y: np.ndarray) -> float:
    out = forward(net, x)[-1]
    r = out - _check_target(net, y)
    return 0.5 * float(r @ r)


def mean_squared_error(net: Mlp, data: TrainingSet) -> float:
    """(1 / (|X| N(L))) * sum_x ||a^(L,x) - y^(x)||^2"""
    out = forward_batch(net, data.inputs)
    return float(np.mean((out - data.targets) ** 2))


def predict(net: Mlp, inputs: np.ndarray) -> np.ndarray:
    return np.argmax(forward_batch(net, inputs), axis=1)


def accuracy(net: Mlp, data: TrainingSet) -> float:
    if data.labels is None:
        expected = np.argmax(data.targets, axis=1)
    else:
        expected = data.labels
    return float(np.mean(predict(net, data.inputs) == expected))


# -------------------------
# training
# -------------------------


def check_compatible(net: Mlp, data: TrainingSet) -> None:
    if data.input_size != net.layer_sizes[0] or data.target_size != net.layer_sizes[-1]:
        raise DimensionMismatchError(
            f"data is {data.input_size}->{data.target_size}, "
            f"net is {net.layer_sizes[0]}->{net.layer_sizes[-1]}"
        )
    data.check_targets(net.activation)


def train_epoch(net: Mlp, data: TrainingSet, order: Sequence[int], eta: float) -> None:
    """One pass of per-sample updates w <- w - eta * gradient, in the given order."""
    for idx in order:
        _, grad = backward(net, data.inputs[idx], data.targets[idx])
        for w, g in zip(net.weights, grad.weights):
            w -= eta * g
        if net.biases is not None:
            for b, g in zip(net.biases, grad.biases):
                b -= eta * g


def train(net: Mlp, data: TrainingSet, cfg: TrainConfig) -> TrainReport:
    """
    Online BP. One step is one epoch; training stops at the first epoch whose MSE is
    <= cfg.epsilon, or after cfg.max_epochs. The sample order of every epoch is drawn
    from a generator seeded once with cfg.shuffle_seed.
    """
    check_compatible(net, data)
    rng = np.random.default_rng(cfg.shuffle_seed)
    trajectory: List[float] = []

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.max_epochs + 1):
            train_epoch(net, data, rng.permutation(len(data)), cfg.eta)
            mse = mean_squared_error(net, data)
            if not np.isfinite(mse):
                logger.warning("training_diverged", epoch=epoch, eta=cfg.eta)
                raise DivergenceError(epoch, mse)
            trajectory.append(mse)
            logger.debug("epoch_done", epoch=epoch, mse=mse)
            if mse <= cfg.epsilon:
                logger.info("training_converged", steps=epoch, mse=mse)
                return TrainReport(steps=epoch, converged=True, mse_trajectory=trajectory)

    logger.info("training_stopped", steps=cfg.max_epochs, mse=trajectory[-1])
    return TrainReport(steps=cfg.max_epochs, converged=False, mse_trajectory=trajectory)


def random_initialize(
    layer_sizes: Sequence[int],
    h: float,
    seed: int,
    activation: str = "tanh",
    use_bias: bool = True,
) -> Mlp:
    """Classical random initialisation: every weight uniform in (-h, h), biases zero."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    rng = np.random.default_rng(seed)
    net = Mlp.zeros(layer_sizes, activation, use_bias)
    net.weights = [rng.uniform(-h, h, size=w.shape) for w in net.weights]
    return net
