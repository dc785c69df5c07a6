"""
Kernel SVM trainer for the review sentiment toolkit.
Solves the class-weighted soft-margin dual with sequential minimal
optimization over maximal-violating pairs, and evaluates the resulting
decision function.
"""
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Literal, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from loguru import logger
from pydantic import BaseModel, validator

from domain_types import Sentiment
from errors import DimensionMismatchError, TrainingDataError

FULL_GRAM_LIMIT = 2000
ETA_FLOOR = 1e-12


class KernelKind(str, Enum):
    LINEAR = "linear"
    RBF = "rbf"
    POLYNOMIAL = "polynomial"


class KernelSpec(BaseModel):
    """Kernel function and its parameters."""

    kind: KernelKind = KernelKind.LINEAR
    gamma: float = 1.0
    degree: int = 3
    coef0: float = 0.0

    class Config:
        extra = "forbid"
        allow_mutation = False

    @validator("gamma")
    def _gamma_positive(cls, value):
        if not value > 0 or not math.isfinite(value):
            raise ValueError("gamma must be a positive finite number")
        return value

    @validator("degree")
    def _degree_positive(cls, value):
        if value < 1:
            raise ValueError("degree must be at least 1")
        return value


class ClassWeights(BaseModel):
    """Per-class multipliers of C."""

    positive: float = 1.0
    negative: float = 1.0

    class Config:
        extra = "forbid"

    @validator("positive", "negative")
    def _weight_positive(cls, value):
        if not value > 0 or not math.isfinite(value):
            raise ValueError("class weights must be positive")
        return value


class TrainSpec(BaseModel):
    """
    Soft-margin cost, class weighting and solver stopping rule.

    The SMO solver draws no random numbers; seed is only stored with the
    model so a bundle records the stage seed it was trained under.
    """

    C: float = 1.0
    class_weights: Union[ClassWeights, Literal["balanced", "none"]] = "balanced"
    tolerance: float = 1e-3
    max_passes: int = 100000
    seed: int = 0
    cache_mb: float = 256.0

    class Config:
        extra = "forbid"

    @validator("C", "tolerance", "cache_mb")
    def _positive(cls, value):
        if not value > 0 or not math.isfinite(value):
            raise ValueError("must be a positive finite number")
        return value

    @validator("max_passes")
    def _non_negative(cls, value):
        if value < 0:
            raise ValueError("max_passes must not be negative")
        return value


@dataclass(frozen=True)
class SmoStep:
    """State after one accepted pairwise update."""

    iteration: int
    i: int
    j: int
    alphas: np.ndarray
    objective: float


@dataclass(frozen=True)
class SvmModel:
    """
    A trained SVM. Only points with a non-zero multiplier are kept.
    """

    support_vectors: np.ndarray
    labels: np.ndarray
    alphas: np.ndarray
    bias: float
    kernel: KernelSpec
    spec: TrainSpec
    box: np.ndarray = field(default_factory=lambda: np.empty(0))
    objective: float = 0.0
    iterations: int = 0
    converged: bool = True
    kkt_gap: float = 0.0

    @property
    def coefficients(self) -> np.ndarray:
        return self.alphas * self.labels

    @property
    def dim(self) -> int:
        return int(self.support_vectors.shape[1])


def kernel_eval(spec: KernelSpec, x, x_prime) -> float:
    """
    Evaluate the kernel on two vectors.

    Args:
        spec: Kernel kind and parameters.
        x: First vector.
        x_prime: Second vector.

    Returns:
        linear <x,x'>, rbf exp(-gamma |x-x'|^2), polynomial (gamma <x,x'> + coef0)^degree.
    """
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape != x_prime.shape:
        raise DimensionMismatchError(f"kernel inputs have shapes {x.shape} and {x_prime.shape}")

    if spec.kind is KernelKind.RBF:
        diff = x - x_prime
        return float(math.exp(-spec.gamma * float(diff @ diff)))
    dot = float(x @ x_prime)
    if spec.kind is KernelKind.POLYNOMIAL:
        return float((spec.gamma * dot + spec.coef0) ** spec.degree)
    return dot


def as_rows(vectors):
    """CSR input stays sparse as float64; anything else becomes a float ndarray."""
    if sp.issparse(vectors):
        return sp.csr_matrix(vectors, dtype=float)
    return np.asarray(vectors, dtype=float)


def _squared_norms(a) -> np.ndarray:
    if sp.issparse(a):
        return np.asarray(a.multiply(a).sum(axis=1)).ravel()
    return np.einsum("ij,ij->i", a, a)


def _dots(a, b) -> np.ndarray:
    if sp.issparse(a):
        product = a @ b.T
    elif sp.issparse(b):
        product = (b @ a.T).T
    else:
        return a @ b.T
    return product.toarray() if sp.issparse(product) else np.asarray(product)


def kernel_matrix(spec: KernelSpec, a, b=None) -> np.ndarray:
    """
    Dense kernel values between the rows of a and the rows of b (a with itself when b is None).

    Either side may be a CSR matrix.
    """
    symmetric = b is None
    b = a if symmetric else b
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(f"kernel inputs have {a.shape[1]} and {b.shape[1]} features")

    dots = _dots(a, b)
    if spec.kind is KernelKind.LINEAR:
        return dots
    if spec.kind is KernelKind.POLYNOMIAL:
        return (spec.gamma * dots + spec.coef0) ** spec.degree

    squared = _squared_norms(a)[:, None] + _squared_norms(b)[None, :] - 2.0 * dots
    gram = np.exp(-spec.gamma * np.maximum(squared, 0.0))
    if symmetric:
        np.fill_diagonal(gram, 1.0)
    return gram


def kernel_diagonal(spec: KernelSpec, vectors) -> np.ndarray:
    """K(x_i, x_i) for every row."""
    norms = _squared_norms(vectors)
    if spec.kind is KernelKind.RBF:
        return np.ones_like(norms)
    if spec.kind is KernelKind.POLYNOMIAL:
        return (spec.gamma * norms + spec.coef0) ** spec.degree
    return norms


class KernelRows:
    """
    Kernel rows of the training set on demand.

    Up to FULL_GRAM_LIMIT points the whole Gram matrix is computed once;
    beyond that rows are kept in an LRU cache bounded by cache_mb.
    """

    def __init__(self, vectors, kernel: KernelSpec, cache_mb: float = 256.0,
                 full_gram_limit: int = FULL_GRAM_LIMIT):
        self.vectors = vectors
        self.kernel = kernel
        n = vectors.shape[0]
        self._gram = kernel_matrix(kernel, vectors) if n <= full_gram_limit else None
        self._rows: "OrderedDict[int, np.ndarray]" = OrderedDict()
        self._capacity = max(2, int(cache_mb * 1024 * 1024 // (8 * max(n, 1))))
        if self._gram is not None:
            self.diagonal = np.diag(self._gram).copy()
        else:
            self.diagonal = kernel_diagonal(kernel, vectors)
            logger.debug(f"Kernel row cache: {self._capacity} rows of {n}")

    def row(self, i: int) -> np.ndarray:
        if self._gram is not None:
            return self._gram[i]
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        values = kernel_matrix(self.kernel, self.vectors[i:i + 1], self.vectors)[0]
        if self.kernel.kind is KernelKind.RBF:
            values[i] = 1.0
        self._rows[i] = values
        if len(self._rows) > self._capacity:
            self._rows.popitem(last=False)
        return values


def _signs(labels: Sequence[Union[Sentiment, int, float]]) -> np.ndarray:
    signs = []
    for label in labels:
        if isinstance(label, Sentiment):
            signs.append(float(label.sign))
        elif label in (1, -1):
            signs.append(float(label))
        else:
            raise TrainingDataError(f"labels must be Sentiment or +/-1, got {label!r}")
    return np.array(signs)


def resolve_class_weights(y: np.ndarray, class_weights) -> ClassWeights:
    """
    Turn a class-weight setting into per-class multipliers.

    "balanced" gives each class n / (2 * n_c); "none" gives both 1.0.
    """
    if isinstance(class_weights, ClassWeights):
        return class_weights
    if class_weights == "none":
        return ClassWeights()
    n = len(y)
    n_positive = int(np.sum(y > 0))
    n_negative = n - n_positive
    return ClassWeights(positive=n / (2.0 * n_positive), negative=n / (2.0 * n_negative))


def dual_objective(alphas: np.ndarray, labels, vectors: np.ndarray, kernel: KernelSpec) -> float:
    """
    sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j).

    Args:
        alphas: Multipliers within their box bounds.
        labels: Sentiments or +/-1 per point.
        vectors: (n, d) training points.
        kernel: Kernel spec.

    Returns:
        The dual objective value.
    """
    alphas = np.asarray(alphas, dtype=float)
    if not np.any(alphas):
        return 0.0
    weighted = alphas * _signs(labels)
    gram = kernel_matrix(kernel, as_rows(vectors))
    return float(alphas.sum() - 0.5 * weighted @ gram @ weighted)


def _select_pair(alphas, y, box, gradient):
    violation = -y * gradient
    up = ((y > 0) & (alphas < box)) | ((y < 0) & (alphas > 0))
    low = ((y > 0) & (alphas > 0)) | ((y < 0) & (alphas < box))
    i = int(np.argmax(np.where(up, violation, -np.inf))) if up.any() else -1
    j = int(np.argmin(np.where(low, violation, np.inf))) if low.any() else -1
    m = violation[i] if i >= 0 else -np.inf
    big_m = violation[j] if j >= 0 else np.inf
    return i, j, m, big_m


def _bias(alphas, y, box, gradient, m, big_m) -> float:
    free = (alphas > 0) & (alphas < box)
    if free.any():
        return float(np.mean(-y[free] * gradient[free]))
    if math.isinf(m):
        return float(big_m)
    if math.isinf(big_m):
        return float(m)
    return float((m + big_m) / 2.0)


def train_svm(vectors, labels, spec: Optional[TrainSpec] = None, kernel: Optional[KernelSpec] = None,
              callback: Optional[Callable[[SmoStep], None]] = None) -> SvmModel:
    """
    Train a class-weighted soft-margin SVM.

    Each step moves the most KKT-violating pair along the equality
    constraint, clipped to the box [0, C * w(y_i)]; the loop ends when the
    violation gap drops to the tolerance or the step cap is reached.

    Args:
        vectors: (n, d) training points, dense or CSR.
        labels: Sentiment (or +/-1) per point; both classes required.
        spec: Cost, class weights, tolerance and step cap.
        kernel: Kernel spec; linear when omitted.
        callback: Called with an SmoStep after every accepted update.

    Returns:
        SvmModel; converged is False when the step cap stopped the solver.
    """
    spec = spec or TrainSpec()
    kernel = kernel or KernelSpec()
    x = as_rows(vectors)
    if x.ndim != 2 or x.shape[0] == 0:
        raise TrainingDataError("training vectors must form a non-empty 2-D array")
    y = _signs(labels)
    if len(y) != x.shape[0]:
        raise DimensionMismatchError(f"{x.shape[0]} vectors but {len(y)} labels")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise TrainingDataError("training data must contain both Positive and Negative examples")
    if not np.all(np.isfinite(x.data if sp.issparse(x) else x)):
        raise TrainingDataError("training vectors contain non-finite values")

    weights = resolve_class_weights(y, spec.class_weights)
    box = np.where(y > 0, spec.C * weights.positive, spec.C * weights.negative)
    rows = KernelRows(x, kernel, spec.cache_mb, FULL_GRAM_LIMIT)

    n = len(y)
    alphas = np.zeros(n)
    gradient = -np.ones(n)
    iterations = 0
    converged = False
    logger.info(f"SMO: {n} points, {x.shape[1]} features, kernel={kernel.kind.value}, C={spec.C}, "
                f"weights=(+{weights.positive:.4g}, -{weights.negative:.4g})")

    while True:
        i, j, m, big_m = _select_pair(alphas, y, box, gradient)
        if i < 0 or j < 0 or m - big_m <= spec.tolerance:
            converged = True
            break
        if iterations >= spec.max_passes:
            break

        row_i = rows.row(i)
        row_j = rows.row(j)
        eta = max(rows.diagonal[i] + rows.diagonal[j] - 2.0 * row_i[j], ETA_FLOOR)
        bound_i = box[i] - alphas[i] if y[i] > 0 else alphas[i]
        bound_j = alphas[j] if y[j] > 0 else box[j] - alphas[j]
        step = min((m - big_m) / eta, bound_i, bound_j)

        new_i = alphas[i] + y[i] * step
        new_j = alphas[j] - y[j] * step
        if step == bound_i:
            new_i = box[i] if y[i] > 0 else 0.0
        if step == bound_j:
            new_j = 0.0 if y[j] > 0 else box[j]

        delta_i = new_i - alphas[i]
        delta_j = new_j - alphas[j]
        alphas[i] = new_i
        alphas[j] = new_j
        gradient += y * (row_i * (y[i] * delta_i) + row_j * (y[j] * delta_j))
        iterations += 1

        if callback is not None:
            objective = 0.5 * alphas.sum() - 0.5 * alphas @ gradient
            callback(SmoStep(iterations, i, j, alphas.copy(), float(objective)))

    _, _, m, big_m = _select_pair(alphas, y, box, gradient)
    gap = float(m - big_m) if not (math.isinf(m) or math.isinf(big_m)) else 0.0
    bias = _bias(alphas, y, box, gradient, m, big_m)
    objective = float(0.5 * alphas.sum() - 0.5 * alphas @ gradient)

    if converged:
        logger.info(f"SMO converged after {iterations} steps (gap {gap:.3g}, objective {objective:.6g})")
    else:
        logger.warning(f"SMO stopped at the step cap {spec.max_passes} with gap {gap:.3g} > {spec.tolerance}")

    support = alphas > 0
    support_rows = x[np.flatnonzero(support)]
    return SvmModel(
        support_vectors=support_rows.toarray() if sp.issparse(support_rows) else support_rows.copy(),
        labels=y[support].copy(),
        alphas=alphas[support].copy(),
        bias=bias,
        kernel=kernel,
        spec=spec,
        box=box[support].copy(),
        objective=objective,
        iterations=iterations,
        converged=converged,
        kkt_gap=gap,
    )


def decision_values(model: SvmModel, vectors) -> np.ndarray:
    """Decision values for the rows of a (n, d) array or CSR matrix."""
    x = as_rows(vectors)
    if not sp.issparse(x):
        x = np.atleast_2d(x)
    if x.shape[1] != model.dim:
        raise DimensionMismatchError(f"model expects {model.dim} features, got {x.shape[1]}")
    if model.support_vectors.shape[0] == 0:
        return np.full(x.shape[0], model.bias)
    return kernel_matrix(model.kernel, x, model.support_vectors) @ model.coefficients + model.bias


def decision_value(model: SvmModel, x) -> float:
    """
    f(x) = sum_i alpha_i y_i K(x_i, x) + b over the stored support vectors.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"expected one vector, got shape {x.shape}")
    return float(decision_values(model, x[None, :])[0])


def predict(model: SvmModel, x) -> Sentiment:
    """Positive when f(x) >= 0, Negative otherwise."""
    return Sentiment.from_sign(decision_value(model, x))


def predict_all(model: SvmModel, vectors) -> List[Sentiment]:
    return [Sentiment.from_sign(value) for value in decision_values(model, vectors)]
