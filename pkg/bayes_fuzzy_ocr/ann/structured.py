"""
Covariances of the form M = alpha * I + beta * J (J the all-ones matrix).

The class is closed under addition and inversion, and M has eigenvalue alpha with
multiplicity n - 1 (vectors summing to zero) and alpha + n * beta (the ones vector), so every
operation needed by the fusion update is O(n) in two scalars. Inversion uses the rank-one
(Sherman-Morrison) identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bayes_fuzzy_ocr.exceptions import DimensionMismatchError, NotPositiveDefiniteError
from bayes_fuzzy_ocr.settings import DENSE_ORACLE_MAX_DIM


@dataclass(frozen=True)
class StructuredCov:
    dim: int
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatchError(f"dim must be positive, got {self.dim}")
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise NotPositiveDefiniteError(f"non-finite coefficients ({self.alpha}, {self.beta})")
        if self.alpha <= 0 or self.alpha + self.dim * self.beta <= 0:
            raise NotPositiveDefiniteError(
                f"alpha={self.alpha}, beta={self.beta}, n={self.dim} is not positive definite "
                "(need alpha > 0 and alpha + n*beta > 0)"
            )

    @classmethod
    def from_diagonal(cls, dim: int, diagonal: float, off_diagonal: float) -> "StructuredCov":
        """Constant diagonal r and constant off-diagonal o map to alpha = r - o, beta = o."""
        return cls(dim, diagonal - off_diagonal, off_diagonal)

    @property
    def diagonal(self) -> float:
        return self.alpha + self.beta

    def eigenvalues(self) -> tuple[float, float]:
        """(alpha, alpha + n * beta); the first has multiplicity n - 1."""
        return self.alpha, self.alpha + self.dim * self.beta

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return structured_matvec(self, v)

    def inverse(self) -> "StructuredCov":
        return structured_inverse(self)

    def __add__(self, other: "StructuredCov") -> "StructuredCov":
        return structured_add(self, other)

    def to_dense(self) -> np.ndarray:
        if self.dim > DENSE_ORACLE_MAX_DIM:
            raise DimensionMismatchError(
                f"dense form limited to n <= {DENSE_ORACLE_MAX_DIM}, got {self.dim}"
            )
        return self.alpha * np.eye(self.dim) + self.beta * np.ones((self.dim, self.dim))


def structured_matvec(m: StructuredCov, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (m.dim,):
        raise DimensionMismatchError(f"vector of shape {v.shape} against dim {m.dim}")
    return m.alpha * v + m.beta * v.sum()


def structured_inverse(m: StructuredCov) -> StructuredCov:
    alpha_inv = 1.0 / m.alpha
    beta_inv = -m.beta / (m.alpha * (m.alpha + m.dim * m.beta))
    return StructuredCov(m.dim, alpha_inv, beta_inv)


def structured_add(a: StructuredCov, b: StructuredCov) -> StructuredCov:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot add dims {a.dim} and {b.dim}")
    return StructuredCov(a.dim, a.alpha + b.alpha, a.beta + b.beta)
