"""CSV and SVG report writers.

Everything written here is byte-deterministic for a given run: floats are
serialized with ``repr`` (exact round-trip), undefined metrics as ``NA``,
and no timestamps appear anywhere.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

from .annotation import LABELS, DatasetVariant, variant_category_shares
from .evaluation import METRIC_NAMES, CrossValidationResult, LearningCurvePoint


def _fmt(value: float | None) -> str:
    return "NA" if value is None else repr(float(value))


def write_metrics_csv(path: str | Path, model: str, cv: CrossValidationResult) -> None:
    """``model,metric,value`` rows: per-metric mean and std across folds."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "metric", "value"])
        for name in METRIC_NAMES:
            writer.writerow([model, f"{name}_mean", _fmt(cv.mean[name])])
            writer.writerow([model, f"{name}_std", _fmt(cv.std[name])])


def write_learning_curve_csv(
    path: str | Path, model: str, points: Sequence[LearningCurvePoint]
) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "train_size", "train_score", "cv_score"])
        for p in points:
            writer.writerow([model, p.train_size, _fmt(p.train_score), _fmt(p.cv_score)])


def write_top_features_csv(
    path: str | Path,
    positive: Sequence[tuple[str, float]],
    negative: Sequence[tuple[str, float]],
) -> None:
    """Two ranked columns: suicidal-class features and others-class features."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["rank", "suicidal_ngram", "suicidal_weight", "others_ngram", "others_weight"]
        )
        for rank, ((p_ng, p_w), (n_ng, n_w)) in enumerate(zip(positive, negative), start=1):
            writer.writerow([rank, p_ng, _fmt(p_w), n_ng, _fmt(n_w)])


def write_variant_summary_csv(
    path: str | Path, variants: Iterable[tuple[str, str, DatasetVariant]]
) -> None:
    """One row per variant: category percentage shares plus the item count."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "model"] + [f"pct_{l.value}" for l in LABELS] + ["total"])
        for name, model, variant in variants:
            shares = variant_category_shares(variant)
            writer.writerow(
                [name, model]
                + [f"{shares[l]:.2f}" for l in LABELS]
                + [variant.size]
            )


def render_learning_curve_svg(
    path: str | Path, model: str, points: Sequence[LearningCurvePoint]
) -> None:
    """Minimal self-contained SVG plot: dashed train curve, solid cv curve."""
    width, height = 640, 400
    left, right, top, bottom = 60, 20, 30, 50
    plot_w, plot_h = width - left - right, height - top - bottom
    if not points:
        Path(path).write_text(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
            f'<text x="20" y="40">no learning-curve points for {model}</text></svg>\n',
            encoding="utf-8",
        )
        return
    xs = [p.train_size for p in points]
    ys = [p.train_score for p in points] + [p.cv_score for p in points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys + [0.5]), max(ys + [1.0])
    x_span = max(x_max - x_min, 1)
    y_span = max(y_max - y_min, 1e-9)

    def sx(x: float) -> float:
        return left + plot_w * (x - x_min) / x_span

    def sy(y: float) -> float:
        return top + plot_h * (1.0 - (y - y_min) / y_span)

    def polyline(values: list[float], color: str, dash: str) -> str:
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, values))
        return (
            f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{coords}"/>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="18" text-anchor="middle" font-size="14">'
        f"learning curve: {model}</text>",
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<text x="{left - 8}" y="{sy(y_max):.1f}" text-anchor="end" font-size="11">'
        f"{y_max:.2f}</text>",
        f'<text x="{left - 8}" y="{sy(y_min):.1f}" text-anchor="end" font-size="11">'
        f"{y_min:.2f}</text>",
        f'<text x="{sx(x_min):.1f}" y="{height - 28}" text-anchor="middle" font-size="11">'
        f"{x_min}</text>",
        f'<text x="{sx(x_max):.1f}" y="{height - 28}" text-anchor="middle" font-size="11">'
        f"{x_max}</text>",
        f'<text x="{width // 2}" y="{height - 8}" text-anchor="middle" font-size="12">'
        "training examples</text>",
        polyline([p.train_score for p in points], "#c0392b", ' stroke-dasharray="6,4"'),
        polyline([p.cv_score for p in points], "#27ae60", ""),
        f'<text x="{left + 10}" y="{top + 16}" font-size="12" fill="#c0392b">'
        "dashed: train score (roc auc)</text>",
        f'<text x="{left + 10}" y="{top + 32}" font-size="12" fill="#27ae60">'
        "solid: cross-validation score (roc auc)</text>",
        "</svg>",
    ]
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
