"""
Synthetic minority oversampling for the review sentiment toolkit.
New minority vectors are interpolated between a minority point and one of
its k nearest minority neighbors in the final feature space.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Union

import numpy as np
import scipy.sparse as sp
from loguru import logger
from pydantic import BaseModel, validator

from domain_types import Sentiment
from errors import DimensionMismatchError, OversampleError

TO_BALANCE = "to-balance"
# absorbs the float error of ((M - m) / m) * m landing just under M - m
COUNT_TOLERANCE = 1e-9


class InterpolationMode(str, Enum):
    STANDARD = "standard"
    PAPER_LITERAL = "paper_literal"


class OversampleSpec(BaseModel):
    """Neighbor count, amount, interpolation mode and seed of one oversampling pass."""

    k: int = 5
    rate_r: float = 1.0
    mode: InterpolationMode = InterpolationMode.STANDARD
    seed: int = 0

    class Config:
        extra = "forbid"

    @validator("k")
    def _k_positive(cls, value):
        if value < 1:
            raise ValueError("k must be at least 1")
        return value

    @validator("rate_r")
    def _rate_positive(cls, value):
        if not value > 0 or not math.isfinite(value):
            raise ValueError("rate_r must be a positive finite number")
        return value


@dataclass(frozen=True)
class SyntheticSample:
    """A generated minority vector and where it came from."""

    vector: np.ndarray
    parent_index: int
    neighbor_index: int
    alpha: float
    label: Sentiment = Sentiment.NEGATIVE


def resolve_rate(rate: Union[float, str], n_majority: int, n_minority: int) -> float:
    """
    Turn a configured rate into a number.

    Args:
        rate: A positive number, or "to-balance".
        n_majority: Majority-class training size.
        n_minority: Minority-class training size.

    Returns:
        The rate; for "to-balance" this is (n_majority - m) / m.
    """
    if rate == TO_BALANCE:
        if n_minority < 1:
            raise OversampleError("cannot balance an empty minority class")
        return (n_majority - n_minority) / n_minority
    return float(rate)


def synthetic_count(rate_r: float, m: int) -> int:
    """floor(rate_r * m), exact for rates produced by resolve_rate."""
    return int(math.floor(rate_r * m + COUNT_TOLERANCE))


def _as_matrix(minority_set) -> np.ndarray:
    matrix = np.asarray(minority_set, dtype=float)
    if matrix.ndim != 2:
        raise OversampleError(f"minority set must be a 2-D array, got {matrix.ndim} dimensions")
    return matrix


def k_nearest_neighbors(point_index: int, minority_set, k: int) -> List[int]:
    """
    Indices of the k minority points closest to one point.

    Args:
        point_index: Row of the query point.
        minority_set: (m, d) array of minority vectors.
        k: Number of neighbors.

    Returns:
        k indices by ascending Euclidean distance, ties by ascending index;
        the point itself is excluded.
    """
    matrix = _as_matrix(minority_set)
    m = matrix.shape[0]
    if k < 1:
        raise OversampleError(f"k must be at least 1, got {k}")
    if k >= m:
        raise OversampleError(f"k={k} needs more than {k} minority points, got {m}")
    if not 0 <= point_index < m:
        raise OversampleError(f"point index {point_index} outside 0..{m - 1}")

    diff = matrix - matrix[point_index]
    distances = np.einsum("ij,ij->i", diff, diff)
    distances[point_index] = np.inf
    order = np.argsort(distances, kind="stable")
    return [int(i) for i in order[:k]]


def synthesize_sample(s: np.ndarray, s_prime: np.ndarray, alpha: float,
                      mode: InterpolationMode = InterpolationMode.STANDARD) -> np.ndarray:
    """
    One synthetic point from a parent S and neighbor S'.

    standard: S + alpha * (S' - S), a point on the segment.
    paper_literal: S + alpha * |S - S'|, which moves away from S' where S > S'.
    """
    s = np.asarray(s, dtype=float)
    s_prime = np.asarray(s_prime, dtype=float)
    if s.shape != s_prime.shape:
        raise DimensionMismatchError(f"parent has shape {s.shape}, neighbor has shape {s_prime.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise OversampleError(f"alpha must lie in [0, 1], got {alpha}")

    if InterpolationMode(mode) is InterpolationMode.PAPER_LITERAL:
        return s + alpha * np.abs(s - s_prime)
    return s + alpha * (s_prime - s)


def neighbor_table(minority_set, k: int) -> np.ndarray:
    """(m, k) array of every minority point's k nearest neighbors."""
    matrix = _as_matrix(minority_set)
    return np.array([k_nearest_neighbors(i, matrix, k) for i in range(matrix.shape[0])], dtype=int)


def oversample(minority_vectors, spec: OversampleSpec) -> List[SyntheticSample]:
    """
    Generate floor(rate_r * m) synthetic minority samples.

    Each sample draws a parent uniformly from the minority set, one of its
    k nearest neighbors uniformly, and a fresh alpha from one seeded stream.

    Args:
        minority_vectors: (m, d) array of minority training vectors.
        spec: k, rate, mode and seed.

    Returns:
        Samples in generation order.
    """
    matrix = _as_matrix(minority_vectors) if len(minority_vectors) else np.empty((0, 0))
    m = matrix.shape[0]
    if m == 0:
        raise OversampleError("cannot oversample an empty minority set")
    if spec.k >= m:
        raise OversampleError(f"k={spec.k} needs more than {spec.k} minority points, got {m}")

    count = synthetic_count(spec.rate_r, m)
    neighbors = neighbor_table(matrix, spec.k)
    rng = np.random.default_rng(spec.seed)

    samples = []
    for _ in range(count):
        parent = int(rng.integers(m))
        neighbor = int(neighbors[parent, int(rng.integers(spec.k))])
        alpha = float(rng.random())
        samples.append(SyntheticSample(
            vector=synthesize_sample(matrix[parent], matrix[neighbor], alpha, spec.mode),
            parent_index=parent,
            neighbor_index=neighbor,
            alpha=alpha,
        ))

    logger.info(f"Oversampled {count} synthetic minority vectors from {m} (k={spec.k}, "
                f"rate={spec.rate_r:.4g}, mode={InterpolationMode(spec.mode).value})")
    return samples


def augment_training_set(matrix, labels: Sequence[Sentiment], spec: OversampleSpec):
    """
    Append synthetic Negative rows to a training matrix.

    Majority rows are passed through untouched and the original row order
    is kept ahead of the synthetic rows. A CSR matrix stays sparse; only
    the minority rows are densified for the neighbor search.

    Args:
        matrix: (n, d) training vectors, dense or CSR.
        labels: Sentiment per row.
        spec: Oversampling parameters.

    Returns:
        (matrix, labels) with the synthetic rows appended.
    """
    labels = list(labels)
    minority_rows = [i for i, label in enumerate(labels) if label is Sentiment.NEGATIVE]
    minority = matrix[minority_rows]
    samples = oversample(minority.toarray() if sp.issparse(minority) else minority, spec)
    if not samples:
        return matrix, labels
    synthetic = np.vstack([sample.vector for sample in samples])
    if sp.issparse(matrix):
        augmented = sp.vstack([matrix, sp.csr_matrix(synthetic)], format="csr")
    else:
        augmented = np.vstack([matrix, synthetic])
    return augmented, labels + [sample.label for sample in samples]
