"""
Weight initialisation by iterated Bayesian fusion of a prior with uniform random measurements.

For every layer k the weights w^(k) are flattened row-major into a vector of length
n = N(k) * N(k-1) and treated as a static unknown. At each iteration t:

    m_t        ~ Uniform(-h, h)^n                      (fresh measurement)
    (R_t)_ii   = max(r_t, off_diag + pd_floor),  (R_t)_lm = off_diag
    r_t        = (1 / n) * sum_{x in subset} ||d^(k,x)||^2, deltas taken with every layer's m_t
    w~_t       = (Q_t^-1 + R_t^-1)^-1 (Q_t^-1 w-_t + R_t^-1 m_t)
    Q_{t+1}    = (Q_t^-1 + R_t^-1)^-1,   w-_{t+1} = w~_t

with w-_1 ~ Uniform(-h, h)^n and Q_1 = q0 * I. Every covariance stays in the alpha*I + beta*J
class, so each update costs O(n).

Random draws come from one generator seeded with ``cfg.seed`` in this order: the priors of
layers 2..L, then for each iteration the measurements of layers 2..L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg

from bayes_fuzzy_ocr.ann.mlp import Mlp, TrainingSet, backward, check_compatible
from bayes_fuzzy_ocr.ann.structured import StructuredCov
from bayes_fuzzy_ocr.exceptions import DimensionMismatchError
from bayes_fuzzy_ocr.logconf import logger
from bayes_fuzzy_ocr.settings import (
    DEFAULT_BI_ITERATIONS,
    DEFAULT_DELTA_SUBSET,
    DEFAULT_OFF_DIAGONAL,
    DEFAULT_PD_FLOOR,
    DENSE_ORACLE_MAX_DIM,
)


class InitConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: float = Field(gt=0)
    iterations: int = Field(default=DEFAULT_BI_ITERATIONS, ge=1)
    off_diag: float = DEFAULT_OFF_DIAGONAL
    prior_var: Optional[float] = Field(default=None, gt=0)
    subset_size: int = Field(default=DEFAULT_DELTA_SUBSET, gt=0)
    pd_floor: float = Field(default=DEFAULT_PD_FLOOR, gt=0)
    seed: int = 0

    @property
    def q0(self) -> float:
        """Prior variance; defaults to h^2 / 3, the variance of Uniform(-h, h)."""
        return self.prior_var if self.prior_var is not None else self.h * self.h / 3.0


@dataclass
class LayerFusion:
    prior_mean: np.ndarray
    prior_cov: StructuredCov
    measurement: np.ndarray
    meas_cov: StructuredCov

    def __post_init__(self):
        n = self.prior_cov.dim
        if (
            self.prior_mean.shape != (n,)
            or self.measurement.shape != (n,)
            or self.meas_cov.dim != n
        ):
            raise DimensionMismatchError("fusion vectors and covariances disagree on dimension")


@dataclass
class FusionState:
    """Per-layer fusion inputs keyed by layer index k = 2..L."""

    layers: Dict[int, LayerFusion] = field(default_factory=dict)

    def layer(self, k: int) -> LayerFusion:
        if k not in self.layers:
            raise DimensionMismatchError(f"no fusion state for layer {k}")
        return self.layers[k]


@dataclass(frozen=True)
class NoiseEstimate:
    iteration: int
    layer: int
    raw: float
    used: float
    posterior_eigenvalues: tuple[float, float]

    @property
    def clamped(self) -> bool:
        return self.used != self.raw


@dataclass
class InitReport:
    noise: List[NoiseEstimate] = field(default_factory=list)

    @property
    def clamp_count(self) -> int:
        return sum(e.clamped for e in self.noise)


# -------------------------
# noise estimate
# -------------------------


def _delta_energy(net: Mlp, subset: TrainingSet) -> np.ndarray:
    """sum over the subset of ||d^(k,x)||^2, for every k = 2..L."""
    if len(subset) == 0:
        raise ValueError("noise variance needs at least one training sample")
    check_compatible(net, subset)
    energy = np.zeros(net.n_layers - 1)
    for x, y in zip(subset.inputs, subset.targets):
        deltas, _ = backward(net, x, y)
        energy += [float(d @ d) for d in deltas.deltas]
    return energy


def measure_noise_variance(net: Mlp, data_subset: TrainingSet, k: int) -> float:
    """(1 / (N(k) N(k-1))) * sum_x ||d^(k,x)||^2 with the net's current weights."""
    n = net.layer_weights(k).size
    return float(_delta_energy(net, data_subset)[k - 2] / n)


# -------------------------
# fusion
# -------------------------


def fuse(state: FusionState, k: int) -> tuple[np.ndarray, StructuredCov]:
    lf = state.layer(k)
    q_inv = lf.prior_cov.inverse()
    r_inv = lf.meas_cov.inverse()
    posterior_cov = (q_inv + r_inv).inverse()
    posterior_mean = posterior_cov.matvec(q_inv.matvec(lf.prior_mean) + r_inv.matvec(lf.measurement))
    return posterior_mean, posterior_cov


def dense_fuse(
    prior_mean: np.ndarray,
    prior_cov: np.ndarray,
    measurement: np.ndarray,
    meas_cov: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Reference fusion with explicit matrices. Test oracle only; limited to small n."""
    n = prior_mean.shape[0]
    if n > DENSE_ORACLE_MAX_DIM:
        raise DimensionMismatchError(f"dense fusion limited to n <= {DENSE_ORACLE_MAX_DIM}")
    q_inv = linalg.inv(prior_cov)
    r_inv = linalg.inv(meas_cov)
    posterior_cov = linalg.inv(q_inv + r_inv)
    posterior_mean = posterior_cov @ (q_inv @ prior_mean + r_inv @ measurement)
    return posterior_mean, posterior_cov


# -------------------------
# full initialisation loop
# -------------------------


def _install(net: Mlp, vectors: Dict[int, np.ndarray]) -> None:
    for k, vec in vectors.items():
        net.weights[k - 2] = vec.reshape(net.weights[k - 2].shape).copy()


def bayes_initialize_with_report(
    net_shape: Sequence[int],
    data: TrainingSet,
    cfg: InitConfig,
    activation: str = "tanh",
    use_bias: bool = True,
) -> tuple[Mlp, InitReport]:
    scratch = Mlp.zeros(net_shape, activation, use_bias)
    check_compatible(scratch, data)
    subset = data.head(min(len(data), cfg.subset_size))
    rng = np.random.default_rng(cfg.seed)
    layers = range(2, scratch.n_layers + 1)
    dims = {k: scratch.layer_weights(k).size for k in layers}

    prior_mean = {k: rng.uniform(-cfg.h, cfg.h, size=dims[k]) for k in layers}
    prior_cov = {k: StructuredCov(dims[k], cfg.q0, 0.0) for k in layers}
    report = InitReport()

    for t in range(1, cfg.iterations + 1):
        measurement = {k: rng.uniform(-cfg.h, cfg.h, size=dims[k]) for k in layers}
        _install(scratch, measurement)
        energy = _delta_energy(scratch, subset)

        state = FusionState()
        estimates = {}
        for k in layers:
            raw = float(energy[k - 2] / dims[k])
            used = max(raw, cfg.off_diag + cfg.pd_floor)
            estimates[k] = (raw, used)
            if used != raw:
                logger.debug("noise_variance_clamped", iteration=t, layer=k, raw=raw, used=used)
            state.layers[k] = LayerFusion(
                prior_mean=prior_mean[k],
                prior_cov=prior_cov[k],
                measurement=measurement[k],
                meas_cov=StructuredCov.from_diagonal(dims[k], used, cfg.off_diag),
            )
        for k in layers:
            prior_mean[k], prior_cov[k] = fuse(state, k)
            report.noise.append(NoiseEstimate(t, k, *estimates[k], prior_cov[k].eigenvalues()))

    net = Mlp.zeros(net_shape, activation, use_bias)
    _install(net, prior_mean)
    return net, report


def bayes_initialize(
    net_shape: Sequence[int],
    data: TrainingSet,
    cfg: InitConfig,
    activation: str = "tanh",
    use_bias: bool = True,
) -> Mlp:
    net, _ = bayes_initialize_with_report(net_shape, data, cfg, activation, use_bias)
    return net
