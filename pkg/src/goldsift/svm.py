"""Class-weighted soft-margin linear SVM: trainer, predictor, feature inspector.

The trainer minimizes, over binary presence features,

    F(w, b) = 0.5 * (||w||^2 + b^2)
              + C * sum_i c_{y_i} * max(0, 1 - y_i * (w . x_i + b))

with y_i in {+1, -1} and per-class penalty multipliers c. The bias is a
constant augmented feature, so it is part of the regularized vector (the
norm above includes b^2).

The solver is dual coordinate descent with per-example caps C * c_{y_i},
one seeded permutation per epoch. After every epoch the best primal
iterate so far is snapshotted; the recorded objective history is therefore
monotone non-increasing by construction and the returned model is the best
iterate, not necessarily the last.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from numba import njit

from .annotation import BinaryClass
from .errors import InputError, TrainingDivergedError
from .textprep import FeatureVector, Vocabulary


@dataclass(frozen=True)
class TrainConfig:
    reg_c: float = 1.0
    class_weight_pos: float = 1.0
    class_weight_neg: float = 1.0
    tol: float = 1e-6
    max_epochs: int = 2000
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("reg_c", "class_weight_pos", "class_weight_neg", "tol"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be strictly positive")
        if self.tol >= 1.0:
            raise InputError("tol must be below 1")
        if self.max_epochs < 1:
            raise InputError("max_epochs must be at least 1")


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    config: TrainConfig
    objective_value: float
    objective_history: tuple[float, ...] = ()

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[0])


Dataset = list[tuple[FeatureVector, BinaryClass]]


def _as_arrays(data: Dataset) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Augmented CSR pieces (indptr, indices, y) plus the feature dimension."""
    if not data:
        raise InputError("training data is empty")
    dim = data[0][0].dimension
    indptr = np.zeros(len(data) + 1, dtype=np.int64)
    chunks: list[np.ndarray] = []
    y = np.empty(len(data), dtype=np.float64)
    for i, (x, cls) in enumerate(data):
        if x.dimension != dim:
            raise InputError(f"feature dimension mismatch: {x.dimension} vs {dim}")
        row = np.fromiter(x.active, dtype=np.int64, count=len(x.active))
        chunks.append(np.append(row, dim))  # trailing bias coordinate
        indptr[i + 1] = indptr[i] + row.shape[0] + 1
        y[i] = 1.0 if cls is BinaryClass.POSITIVE else -1.0
    indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return indptr, indices, y, dim


def _caps(y: np.ndarray, config: TrainConfig) -> np.ndarray:
    caps = np.where(y > 0, config.class_weight_pos, config.class_weight_neg)
    return config.reg_c * caps


def _csr_matrix(indptr: np.ndarray, indices: np.ndarray, dim: int) -> sp.csr_matrix:
    data = np.ones(indices.shape[0], dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(indptr.shape[0] - 1, dim + 1))


def _objective_value(v: np.ndarray, Z: sp.csr_matrix, y: np.ndarray, caps: np.ndarray) -> float:
    hinge = np.maximum(0.0, 1.0 - y * (Z @ v))
    return float(0.5 * (v @ v) + caps @ hinge)


def objective(model: LinearModel, data: Dataset) -> float:
    """Primal objective of a model on a dataset (bias included in the norm)."""
    indptr, indices, y, dim = _as_arrays(data)
    if dim != model.dimension:
        raise InputError(f"model dimension {model.dimension} does not match data dimension {dim}")
    v = np.append(model.weights.astype(np.float64), model.bias)
    return _objective_value(v, _csr_matrix(indptr, indices, dim), y, _caps(y, model.config))


def objective_subgradient(
    model: LinearModel, data: Dataset
) -> tuple[np.ndarray, float]:
    """Analytic subgradient of the objective at the model's point.

    At margins exactly 1 the hinge is non-differentiable; this picks the
    zero-slope branch, so compare against finite differences only away from
    those kinks.
    """
    indptr, indices, y, dim = _as_arrays(data)
    if dim != model.dimension:
        raise InputError(f"model dimension {model.dimension} does not match data dimension {dim}")
    v = np.append(model.weights.astype(np.float64), model.bias)
    Z = _csr_matrix(indptr, indices, dim)
    caps = _caps(y, model.config)
    active = (y * (Z @ v)) < 1.0
    coeff = np.where(active, -caps * y, 0.0)
    grad = v + Z.T @ coeff
    return grad[:dim], float(grad[dim])


@njit(cache=True)
def _dcd_epoch(indptr, indices, y, caps, qii, alpha, v, order):  # pragma: no cover
    for t in range(order.shape[0]):
        i = order[t]
        start = indptr[i]
        end = indptr[i + 1]
        dot = 0.0
        for s in range(start, end):
            dot += v[indices[s]]
        g = y[i] * dot - 1.0
        a_new = alpha[i] - g / qii[i]
        if a_new < 0.0:
            a_new = 0.0
        elif a_new > caps[i]:
            a_new = caps[i]
        delta = a_new - alpha[i]
        if delta != 0.0:
            alpha[i] = a_new
            dy = delta * y[i]
            for s in range(start, end):
                v[indices[s]] += dy


def train(data: Dataset, config: TrainConfig) -> LinearModel:
    """Fit the weighted soft-margin objective.

    Deterministic given data order and ``config.seed``; stops when the
    solver objective's relative decrease over one epoch falls below
    ``config.tol`` or after ``config.max_epochs`` epochs.
    """
    indptr, indices, y, dim = _as_arrays(data)
    caps = _caps(y, config)
    Z = _csr_matrix(indptr, indices, dim)
    qii = np.diff(indptr).astype(np.float64)  # all feature values are 1

    v = np.zeros(dim + 1, dtype=np.float64)
    alpha = np.zeros(len(data), dtype=np.float64)
    best_v = v.copy()
    best_obj = _objective_value(v, Z, y, caps)
    history: list[float] = []
    rng = np.random.default_rng(config.seed)

    # Convergence is tracked on the solver's own objective (the negated
    # dual, 0.5||v||^2 - sum(alpha)), which coordinate ascent decreases
    # monotonically; the primal can tick up mid-run even while converging.
    solver_obj = 0.0
    for _ in range(config.max_epochs):
        order = rng.permutation(len(data))
        _dcd_epoch(indptr, indices, y, caps, qii, alpha, v, order)
        obj = _objective_value(v, Z, y, caps)
        if math.isnan(obj):
            raise TrainingDivergedError("objective became NaN during training")
        if obj < best_obj:
            best_obj = obj
            best_v = v.copy()
        history.append(best_obj)
        prev_solver_obj = solver_obj
        solver_obj = 0.5 * float(v @ v) - float(alpha.sum())
        if (prev_solver_obj - solver_obj) / max(abs(solver_obj), 1e-300) < config.tol:
            break

    return LinearModel(
        weights=best_v[:dim].copy(),
        bias=float(best_v[dim]),
        config=config,
        objective_value=best_obj,
        objective_history=tuple(history),
    )


def decision_function(model: LinearModel, x: FeatureVector) -> float:
    """Raw score w.x + b."""
    if x.dimension != model.dimension:
        raise InputError(f"vector dimension {x.dimension} does not match model {model.dimension}")
    return float(model.weights[list(x.active)].sum() + model.bias)


def predict(model: LinearModel, x: FeatureVector) -> BinaryClass:
    """Positive iff the score is strictly above zero (ties go negative)."""
    return BinaryClass.POSITIVE if decision_function(model, x) > 0.0 else BinaryClass.NEGATIVE


def top_features(
    model: LinearModel, vocab: Vocabulary, k: int
) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """The k most positive and k most negative hyperplane weights.

    Positive list descends from the largest weight, negative list ascends
    from the most negative; ties break lexicographically.
    """
    if vocab.dimension != model.dimension:
        raise InputError(
            f"vocabulary dimension {vocab.dimension} does not match model {model.dimension}"
        )
    if k > model.dimension:
        raise InputError(f"k={k} exceeds feature dimension {model.dimension}")
    pairs = [(ngram, float(w)) for ngram, w in zip(vocab.entries, model.weights)]
    positive = sorted(pairs, key=lambda p: (-p[1], p[0]))[:k]
    negative = sorted(pairs, key=lambda p: (p[1], p[0]))[:k]
    return positive, negative


def save_model(model: LinearModel, path: str | Path) -> None:
    payload = {
        "dimension": model.dimension,
        "bias": model.bias,
        "weights": [float(w) for w in model.weights],
        "config": asdict(model.config),
        "objective_value": model.objective_value,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    weights = np.asarray(payload["weights"], dtype=np.float64)
    if weights.shape[0] != payload["dimension"]:
        raise InputError(f"{path}: weight count does not match declared dimension")
    return LinearModel(
        weights=weights,
        bias=float(payload["bias"]),
        config=TrainConfig(**payload["config"]),
        objective_value=float(payload["objective_value"]),
    )
