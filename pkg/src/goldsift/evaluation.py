"""Metrics, stratified cross-validation, class-weight grid search, learning curves.

Cross-validation rebuilds the n-gram vocabulary inside every fold from the
training split only, so a test item's n-grams can never leak into the
feature space used to score it. Ranking metrics (ROC AUC, average
precision) are undefined on single-class folds and reported as ``None``;
aggregation skips such folds instead of zero-filling them.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .annotation import BinaryClass, DatasetVariant
from .errors import InputError
from .rng import derive_seed
from .svm import LinearModel, TrainConfig, decision_function, train
from .textprep import Vocabulary, build_vocabulary, vectorize

logger = logging.getLogger(__name__)

METRIC_NAMES = (
    "accuracy",
    "precision",
    "recall",
    "f1",
    "f1_weighted",
    "roc_auc",
    "average_precision",
)

DEFAULT_GRID: tuple[tuple[float, float], ...] = (
    (1.0, 1.0),
    (2.0, 1.0),
    (4.0, 1.0),
    (8.0, 1.0),
    (16.0, 1.0),
    (32.0, 1.0),
)

DEFAULT_CURVE_SIZES = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(pred: Sequence[BinaryClass], truth: Sequence[BinaryClass]) -> ConfusionMatrix:
    """Standard 2x2 counts with the suicidal class as positive."""
    if len(pred) != len(truth):
        raise InputError(f"length mismatch: {len(pred)} predictions vs {len(truth)} truths")
    if not truth:
        raise InputError("cannot build a confusion matrix from zero examples")
    tp = fp = tn = fn = 0
    for p, t in zip(pred, truth):
        if p is BinaryClass.POSITIVE:
            if t is BinaryClass.POSITIVE:
                tp += 1
            else:
                fp += 1
        else:
            if t is BinaryClass.POSITIVE:
                fn += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class MetricsReport:
    """Threshold metrics plus ranking metrics; the latter are ``None`` when undefined."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    f1_weighted: float
    roc_auc: float | None
    average_precision: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _truth_mask(truth: Sequence[BinaryClass]) -> np.ndarray:
    return np.fromiter((t is BinaryClass.POSITIVE for t in truth), dtype=bool, count=len(truth))


def roc_auc_score(scores: Sequence[float], truth: Sequence[BinaryClass]) -> float | None:
    """Probability a random positive outranks a random negative, ties counted half.

    Midrank formulation (Mann-Whitney U / (n_pos * n_neg)); ``None`` when a
    class is absent.
    """
    pos = _truth_mask(truth)
    n_pos = int(pos.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    s = np.asarray(scores, dtype=np.float64)
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s), dtype=np.float64)
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and s[order[j]] == s[order[i]]:
            j += 1
        ranks[order[i:j]] = 0.5 * (i + j + 1)  # average of 1-based positions i+1 .. j
        i = j
    rank_sum = float(ranks[pos].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def average_precision_score(scores: Sequence[float], truth: Sequence[BinaryClass]) -> float | None:
    """Area under the precision-recall sweep in score-descending order.

    Tied scores enter the sweep as one group, so the result does not depend
    on input order. ``None`` when a class is absent.
    """
    pos = _truth_mask(truth)
    n_pos = int(pos.sum())
    if n_pos == 0 or n_pos == len(truth):
        return None
    s = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-s, kind="stable")
    sorted_scores = s[order]
    cum_tp = np.cumsum(pos[order].astype(np.int64))
    cum_seen = np.arange(1, len(s) + 1)
    group_end = np.append(sorted_scores[1:] != sorted_scores[:-1], True)
    recall = cum_tp[group_end] / n_pos
    prec = cum_tp[group_end] / cum_seen[group_end]
    return float(np.sum(np.diff(np.concatenate(([0.0], recall))) * prec))


def metrics(
    scores: Sequence[float], truth: Sequence[BinaryClass], threshold: float = 0.0
) -> MetricsReport:
    """Full metric suite at a score threshold (ties at the threshold go negative)."""
    if len(scores) != len(truth):
        raise InputError(f"length mismatch: {len(scores)} scores vs {len(truth)} truths")
    if not truth:
        raise InputError("cannot compute metrics on zero examples")
    pred = [BinaryClass.POSITIVE if s > threshold else BinaryClass.NEGATIVE for s in scores]
    cm = confusion(pred, truth)
    n = cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    neg_precision = cm.tn / (cm.tn + cm.fn) if cm.tn + cm.fn else 0.0
    neg_recall = cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp else 0.0
    neg_f1 = (
        2 * neg_precision * neg_recall / (neg_precision + neg_recall)
        if neg_precision + neg_recall
        else 0.0
    )
    n_pos = cm.tp + cm.fn
    n_neg = cm.tn + cm.fp
    return MetricsReport(
        accuracy=(cm.tp + cm.tn) / n,
        precision=precision,
        recall=recall,
        f1=f1,
        f1_weighted=(n_pos * f1 + n_neg * neg_f1) / n,
        roc_auc=roc_auc_score(scores, truth),
        average_precision=average_precision_score(scores, truth),
    )


@dataclass(frozen=True)
class FoldPlan:
    """Stratified assignment of items to folds."""

    k: int
    assignments: dict[str, int]

    def test_ids(self, fold: int) -> list[str]:
        return sorted(i for i, f in self.assignments.items() if f == fold)

    def train_ids(self, fold: int) -> list[str]:
        return sorted(i for i, f in self.assignments.items() if f != fold)

    def digest(self) -> str:
        blob = ";".join(f"{i}={f}" for i, f in sorted(self.assignments.items()))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def stratified_kfold(
    items: Sequence[tuple[str, BinaryClass]], k: int, seed: int
) -> FoldPlan:
    """Deterministic per-class round-robin assignment after a seeded shuffle.

    Consecutive classes start assigning where the previous one stopped, so
    both per-class counts and overall fold sizes differ by at most one.
    """
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    if k > len(items):
        raise InputError(f"k={k} exceeds the number of items ({len(items)})")
    ids = [item_id for item_id, _ in items]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate item ids in fold plan input")
    by_class: dict[BinaryClass, list[str]] = {
        BinaryClass.POSITIVE: [],
        BinaryClass.NEGATIVE: [],
    }
    for item_id, cls in items:
        by_class[cls].append(item_id)
    if not by_class[BinaryClass.POSITIVE] or not by_class[BinaryClass.NEGATIVE]:
        raise InputError("stratification requires at least one item of each class")
    rng = np.random.default_rng(seed)
    assignments: dict[str, int] = {}
    offset = 0
    for cls in (BinaryClass.POSITIVE, BinaryClass.NEGATIVE):
        members = sorted(by_class[cls])
        perm = rng.permutation(len(members))
        for j, idx in enumerate(perm):
            assignments[members[idx]] = (j + offset) % k
        offset = (offset + len(members)) % k
    return FoldPlan(k=k, assignments=assignments)


@dataclass
class FoldResult:
    fold: int
    train_size: int
    test_size: int
    vocabulary: Vocabulary
    report: MetricsReport


@dataclass
class CrossValidationResult:
    folds: list[FoldResult]
    mean: dict[str, float | None]
    std: dict[str, float | None]


def _aggregate(reports: list[MetricsReport]) -> tuple[dict, dict]:
    mean: dict[str, float | None] = {}
    std: dict[str, float | None] = {}
    for name in METRIC_NAMES:
        values = [r.as_dict()[name] for r in reports if r.as_dict()[name] is not None]
        if not values:
            mean[name] = None
            std[name] = None
        elif all(v == values[0] for v in values):
            mean[name] = values[0]
            std[name] = 0.0 if len(values) > 1 else None
        else:
            mean[name] = float(np.mean(values))
            std[name] = float(np.std(values, ddof=1)) if len(values) > 1 else None
    return mean, std


def _fit_fold(
    docs: Mapping[str, list[str]],
    labels: Mapping[str, BinaryClass],
    train_ids: Sequence[str],
    vocab_size: int,
    config: TrainConfig,
) -> tuple[Vocabulary, LinearModel]:
    vocab = build_vocabulary([docs[i] for i in train_ids], vocab_size)
    data = [(vectorize(docs[i], vocab), labels[i]) for i in train_ids]
    return vocab, train(data, config)


def _score_ids(
    model: LinearModel,
    vocab: Vocabulary,
    docs: Mapping[str, list[str]],
    ids: Sequence[str],
) -> list[float]:
    return [decision_function(model, vectorize(docs[i], vocab)) for i in ids]


def cross_validate(
    variant: DatasetVariant,
    docs: Mapping[str, list[str]],
    plan: FoldPlan,
    config: TrainConfig,
    vocab_size: int = 10_000,
) -> CrossValidationResult:
    """Leak-free k-fold evaluation: vocabulary and model fit per fold.

    The plan must cover exactly the variant's items. Aggregates are the
    unweighted mean and sample standard deviation across folds, with
    undefined ranking metrics excluded.
    """
    labels = dict(variant.binary_items())
    if set(plan.assignments) != set(labels):
        raise InputError("fold plan does not cover exactly the variant's items")
    missing = sorted(set(labels) - set(docs))
    if missing:
        raise InputError(f"no documents for items: {missing[:5]}")
    folds: list[FoldResult] = []
    for fold in range(plan.k):
        train_ids = plan.train_ids(fold)
        test_ids = plan.test_ids(fold)
        vocab, model = _fit_fold(docs, labels, train_ids, vocab_size, config)
        scores = _score_ids(model, vocab, docs, test_ids)
        report = metrics(scores, [labels[i] for i in test_ids])
        folds.append(
            FoldResult(
                fold=fold,
                train_size=len(train_ids),
                test_size=len(test_ids),
                vocabulary=vocab,
                report=report,
            )
        )
    mean, std = _aggregate([f.report for f in folds])
    return CrossValidationResult(folds=folds, mean=mean, std=std)


@dataclass(frozen=True)
class GridPoint:
    class_weight_pos: float
    class_weight_neg: float
    mean_roc_auc: float | None
    valid_folds: int


@dataclass
class GridSearchResult:
    best: tuple[float, float]
    table: list[GridPoint]


def grid_search_class_weights(
    items: Sequence[tuple[str, BinaryClass]],
    docs: Mapping[str, list[str]],
    grid: Sequence[tuple[float, float]],
    k: int,
    seed: int,
    config: TrainConfig = TrainConfig(),
    vocab_size: int = 10_000,
) -> GridSearchResult:
    """Pick the class-weight pair with the best k-fold mean ROC AUC.

    Ties break toward the smaller positive/negative weight ratio, then grid
    order. Fold data (vocabulary and vectors) is shared across grid points
    since only the penalty weights change.
    """
    if not grid:
        raise InputError("class-weight grid is empty")
    plan = stratified_kfold(items, k, derive_seed(seed, "folds"))
    labels = dict(items)
    prepared = []
    for fold in range(k):
        train_ids = plan.train_ids(fold)
        test_ids = plan.test_ids(fold)
        vocab = build_vocabulary([docs[i] for i in train_ids], vocab_size)
        train_data = [(vectorize(docs[i], vocab), labels[i]) for i in train_ids]
        test_vectors = [vectorize(docs[i], vocab) for i in test_ids]
        test_truth = [labels[i] for i in test_ids]
        prepared.append((train_data, test_vectors, test_truth))

    table: list[GridPoint] = []
    for c_pos, c_neg in grid:
        aucs: list[float] = []
        for train_data, test_vectors, test_truth in prepared:
            point_config = replace(config, class_weight_pos=c_pos, class_weight_neg=c_neg)
            model = train(train_data, point_config)
            auc = roc_auc_score([decision_function(model, x) for x in test_vectors], test_truth)
            if auc is not None:
                aucs.append(auc)
        mean_auc = float(np.mean(aucs)) if aucs else None
        table.append(
            GridPoint(
                class_weight_pos=c_pos,
                class_weight_neg=c_neg,
                mean_roc_auc=mean_auc,
                valid_folds=len(aucs),
            )
        )

    scored = [
        (-(p.mean_roc_auc), p.class_weight_pos / p.class_weight_neg, idx)
        for idx, p in enumerate(table)
        if p.mean_roc_auc is not None
    ]
    if not scored:
        raise InputError("no grid point produced a defined ROC AUC")
    best_idx = min(scored)[2]
    best_point = table[best_idx]
    return GridSearchResult(
        best=(best_point.class_weight_pos, best_point.class_weight_neg), table=table
    )


@dataclass(frozen=True)
class LearningCurvePoint:
    train_size: int
    train_score: float
    cv_score: float


def learning_curve(
    items: Sequence[tuple[str, BinaryClass]],
    docs: Mapping[str, list[str]],
    sizes: Sequence[float],
    k: int,
    seed: int,
    config: TrainConfig = TrainConfig(),
    vocab_size: int = 10_000,
) -> list[LearningCurvePoint]:
    """Train and cross-validation ROC AUC as the training split grows.

    For each fraction, every fold trains on a seeded stratified prefix of
    its training split (prefixes are nested across fractions) with the
    vocabulary rebuilt on that subset. The fold plan is
    ``stratified_kfold(items, k, derive_seed(seed, "folds"))``, so at
    fraction 1.0 the cv score matches :func:`cross_validate` on that plan.
    Fractions yielding an empty class in any fold are skipped with a warning.
    """
    if not sizes:
        raise InputError("sizes is empty")
    if any(not 0.0 < f <= 1.0 for f in sizes):
        raise InputError("fractions must lie in (0, 1]")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InputError("fractions must be strictly increasing")
    plan = stratified_kfold(items, k, derive_seed(seed, "folds"))
    labels = dict(items)

    # one permutation per (fold, class); fraction prefixes nest inside it
    fold_orders: list[dict[BinaryClass, list[str]]] = []
    for fold in range(k):
        train_ids = plan.train_ids(fold)
        orders: dict[BinaryClass, list[str]] = {}
        for cls in (BinaryClass.POSITIVE, BinaryClass.NEGATIVE):
            members = [i for i in train_ids if labels[i] is cls]
            rng = np.random.default_rng(derive_seed(seed, "subset", fold, cls.value))
            orders[cls] = [members[j] for j in rng.permutation(len(members))]
        fold_orders.append(orders)

    points: list[LearningCurvePoint] = []
    for frac in sizes:
        subset_sizes: list[int] = []
        train_scores: list[float] = []
        cv_scores: list[float] = []
        feasible = True
        for fold in range(k):
            orders = fold_orders[fold]
            subset: list[str] = []
            for cls in (BinaryClass.POSITIVE, BinaryClass.NEGATIVE):
                m = int(frac * len(orders[cls]) + 1e-9)
                if m < 1:
                    feasible = False
                    break
                subset.extend(orders[cls][:m])
            if not feasible:
                break
            subset = sorted(subset)
            vocab, model = _fit_fold(docs, labels, subset, vocab_size, config)
            train_auc = roc_auc_score(
                _score_ids(model, vocab, docs, subset), [labels[i] for i in subset]
            )
            test_ids = plan.test_ids(fold)
            cv_auc = roc_auc_score(
                _score_ids(model, vocab, docs, test_ids), [labels[i] for i in test_ids]
            )
            subset_sizes.append(len(subset))
            if train_auc is not None:
                train_scores.append(train_auc)
            if cv_auc is not None:
                cv_scores.append(cv_auc)
        if not feasible or not train_scores or not cv_scores:
            logger.warning(
                "learning curve: skipping fraction %s (training subset lost a class)", frac
            )
            continue
        points.append(
            LearningCurvePoint(
                train_size=int(round(float(np.mean(subset_sizes)))),
                train_score=float(np.mean(train_scores)),
                cv_score=float(np.mean(cv_scores)),
            )
        )
    return points
