"""Multi-annotator label ingestion, gold-label construction, agreement stats.

Gold labels are built in two rounds. Items every crowd annotator agreed on
get provenance ``R1U``. The rest go to a two-expert queue: matching expert
labels resolve as ``R2U``, mismatching ones fall back to the crowd majority
as ``R2S``, and mismatches over a tied crowd vote are dropped with an audit
record. ``R1S`` labels every item straight from the (trust-weighted) crowd
majority regardless of agreement.
"""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InputError


class Label(str, Enum):
    A = "A"  # suicidal thoughts
    B = "B"  # supportive messages / helpful information
    C = "C"  # reaction to suicide news / movie / music
    D = "D"  # other


LABELS = (Label.A, Label.B, Label.C, Label.D)


class Round(str, Enum):
    CROWD = "crowd"
    EXPERT = "expert"


class Provenance(str, Enum):
    R1S = "R1S"
    R1U = "R1U"
    R2U = "R2U"
    R2S = "R2S"


class BinaryClass(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def binarize(label: Label) -> BinaryClass:
    """A is the suicidal (positive) class; B, C and D collapse to negative."""
    return BinaryClass.POSITIVE if label is Label.A else BinaryClass.NEGATIVE


@dataclass(frozen=True)
class Annotation:
    item_id: str
    annotator_id: str
    label: Label
    round: Round
    trust: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.trust <= 1.0:
            raise InputError(f"trust must be in (0, 1], got {self.trust}")


@dataclass(frozen=True)
class LabelDistribution:
    """Per-item label tallies: raw counts and trust-weighted mass."""

    item_id: str
    counts: Mapping[Label, int]
    weighted: Mapping[Label, float]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class GoldLabel:
    item_id: str
    label: Label
    provenance: Provenance


def distribution(annotations: list[Annotation]) -> LabelDistribution:
    """Tally one item's annotations into counts and trust-weighted mass."""
    if not annotations:
        raise InputError("cannot build a distribution from zero annotations")
    item_id = annotations[0].item_id
    counts = {label: 0 for label in LABELS}
    weighted = {label: 0.0 for label in LABELS}
    for ann in annotations:
        if ann.item_id != item_id:
            raise InputError(f"mixed item ids in distribution: {item_id!r} vs {ann.item_id!r}")
        counts[ann.label] += 1
        weighted[ann.label] += ann.trust
    return LabelDistribution(item_id=item_id, counts=counts, weighted=weighted)


def majority_label(dist: LabelDistribution) -> Label | None:
    """Label with strictly maximal weighted mass; ``None`` when tied (unresolved)."""
    best = max(dist.weighted.values())
    winners = [label for label in LABELS if dist.weighted[label] == best]
    return winners[0] if len(winners) == 1 else None


def unanimous_label(dist: LabelDistribution) -> Label | None:
    """The label everyone chose, or ``None`` if more than one label has votes."""
    voted = [label for label in LABELS if dist.counts[label] > 0]
    return voted[0] if len(voted) == 1 else None


def merge_expert(
    item_id: str,
    crowd_majority: Label | None,
    expert1: Label,
    expert2: Label,
    *,
    crowd_unanimous: bool = False,
) -> GoldLabel | None:
    """Resolve one queue item from its two expert labels.

    Identical expert labels win (``R2U``); otherwise the crowd majority is
    adopted (``R2S``); with no crowd majority either, the item is dropped
    (returns ``None``).
    """
    if crowd_unanimous:
        raise InputError(f"item {item_id!r} was crowd-unanimous and never entered round 2")
    if expert1 is expert2:
        return GoldLabel(item_id=item_id, label=expert1, provenance=Provenance.R2U)
    if crowd_majority is not None:
        return GoldLabel(item_id=item_id, label=crowd_majority, provenance=Provenance.R2S)
    return None


@dataclass(frozen=True)
class GoldStandard:
    """Everything derived from one pass over the annotation file."""

    item_ids: tuple[str, ...]
    distributions: dict[str, LabelDistribution]
    majority: dict[str, Label]
    majority_ties: tuple[str, ...]
    unanimous: dict[str, Label]
    round2_queue: tuple[str, ...]
    gold: dict[str, GoldLabel]
    dropped: tuple[str, ...]
    pending: tuple[str, ...]
    expert_pairs: dict[str, tuple[Label, Label]]

    @property
    def percent_unanimous(self) -> float:
        return 100.0 * len(self.unanimous) / len(self.item_ids)


def aggregate(annotations: Iterable[Annotation]) -> GoldStandard:
    """Aggregate crowd and expert annotations into gold labels.

    Fails fast on expert labels for crowd-unanimous items or for items with
    no crowd annotations, and on more than two expert annotators.
    """
    crowd: dict[str, list[Annotation]] = defaultdict(list)
    expert: dict[str, list[Annotation]] = defaultdict(list)
    for ann in annotations:
        (crowd if ann.round is Round.CROWD else expert)[ann.item_id].append(ann)
    if not crowd:
        raise InputError("no crowd annotations found")

    expert_ids = sorted({a.annotator_id for anns in expert.values() for a in anns})
    if len(expert_ids) > 2:
        raise InputError(f"expected at most two expert annotators, found {expert_ids}")
    unknown = sorted(set(expert) - set(crowd))
    if unknown:
        raise InputError(f"expert annotations for items with no crowd round: {unknown[:5]}")

    item_ids = tuple(sorted(crowd))
    dists: dict[str, LabelDistribution] = {}
    majority: dict[str, Label] = {}
    ties: list[str] = []
    unanimous: dict[str, Label] = {}
    queue: list[str] = []
    gold: dict[str, GoldLabel] = {}
    dropped: list[str] = []
    pending: list[str] = []
    expert_pairs: dict[str, tuple[Label, Label]] = {}

    for item_id in item_ids:
        dist = distribution(crowd[item_id])
        dists[item_id] = dist
        maj = majority_label(dist)
        if maj is not None:
            majority[item_id] = maj
        else:
            ties.append(item_id)
        unan = unanimous_label(dist)
        if unan is not None:
            if item_id in expert:
                raise InputError(f"item {item_id!r} is crowd-unanimous but has expert labels")
            unanimous[item_id] = unan
            gold[item_id] = GoldLabel(item_id=item_id, label=unan, provenance=Provenance.R1U)
            continue
        queue.append(item_id)
        pair = sorted(expert.get(item_id, ()), key=lambda a: a.annotator_id)
        if len(pair) < 2:
            pending.append(item_id)
            continue
        labels = (pair[0].label, pair[1].label)
        expert_pairs[item_id] = labels
        merged = merge_expert(item_id, maj, labels[0], labels[1])
        if merged is None:
            dropped.append(item_id)
        else:
            gold[item_id] = merged

    return GoldStandard(
        item_ids=item_ids,
        distributions=dists,
        majority=majority,
        majority_ties=tuple(ties),
        unanimous=unanimous,
        round2_queue=tuple(queue),
        gold=gold,
        dropped=tuple(dropped),
        pending=tuple(pending),
        expert_pairs=expert_pairs,
    )


VARIANTS = ("V_R1S", "V_R1U", "V_R2U", "V_R1U_R2U", "V_R1U_R2U_R2S")

MODEL_NAMES = {
    "V_R1S": "C1",
    "V_R1U": "C2",
    "V_R2U": "C3",
    "V_R1U_R2U": "C4",
    "V_R1U_R2U_R2S": "C5",
}


@dataclass(frozen=True)
class DatasetVariant:
    """A named selection of gold-labeled items used to train one model."""

    name: str
    items: tuple[tuple[str, GoldLabel], ...]

    @property
    def size(self) -> int:
        return len(self.items)

    def binary_items(self) -> list[tuple[str, BinaryClass]]:
        return [(item_id, binarize(gl.label)) for item_id, gl in self.items]


def build_variant(name: str, gold: GoldStandard) -> DatasetVariant:
    """Select the items belonging to one labeling strategy."""
    if name == "V_R1S":
        picked = {
            item: GoldLabel(item_id=item, label=label, provenance=Provenance.R1S)
            for item, label in gold.majority.items()
        }
    elif name == "V_R1U":
        picked = {i: gl for i, gl in gold.gold.items() if gl.provenance is Provenance.R1U}
    elif name == "V_R2U":
        picked = {i: gl for i, gl in gold.gold.items() if gl.provenance is Provenance.R2U}
    elif name == "V_R1U_R2U":
        wanted = (Provenance.R1U, Provenance.R2U)
        picked = {i: gl for i, gl in gold.gold.items() if gl.provenance in wanted}
    elif name == "V_R1U_R2U_R2S":
        picked = dict(gold.gold)
    else:
        raise InputError(f"unknown variant {name!r} (expected one of {VARIANTS})")
    items = tuple((item_id, picked[item_id]) for item_id in sorted(picked))
    return DatasetVariant(name=name, items=items)


def variant_category_shares(variant: DatasetVariant) -> dict[Label, float]:
    """Percentage of each category within a variant."""
    counts = {label: 0 for label in LABELS}
    for _, gl in variant.items:
        counts[gl.label] += 1
    total = max(variant.size, 1)
    return {label: 100.0 * counts[label] / total for label in LABELS}


@dataclass(frozen=True)
class AgreementReport:
    """Chance-corrected agreement between two raters over one item set."""

    kappa: float
    percent_unanimous: float
    contingency: dict[tuple[Label, Label], int]


def cohen_kappa(rater1: Mapping[str, Label], rater2: Mapping[str, Label]) -> AgreementReport:
    """Cohen's kappa with the degenerate expected-agreement case pinned.

    Computed from integer tallies (kappa = (n*agree - S) / (n^2 - S) with
    S the sum of marginal products), so label permutations and rater order
    cannot perturb the result through float summation order.
    """
    if set(rater1) != set(rater2):
        raise InputError("raters labeled different item sets")
    if not rater1:
        raise InputError("raters labeled no items")
    contingency = {(l1, l2): 0 for l1 in LABELS for l2 in LABELS}
    for item, label1 in rater1.items():
        contingency[(label1, rater2[item])] += 1
    n = len(rater1)
    agree = sum(contingency[(label, label)] for label in LABELS)
    marg1 = {l1: sum(contingency[(l1, l2)] for l2 in LABELS) for l1 in LABELS}
    marg2 = {l2: sum(contingency[(l1, l2)] for l1 in LABELS) for l2 in LABELS}
    chance = sum(marg1[label] * marg2[label] for label in LABELS)
    if n * n == chance:
        kappa = 1.0 if agree == n else 0.0
    else:
        kappa = (n * agree - chance) / (n * n - chance)
    return AgreementReport(
        kappa=kappa,
        percent_unanimous=100.0 * agree / n,
        contingency=contingency,
    )


def load_annotations(path: str | Path) -> list[Annotation]:
    """Read a JSON Lines annotation file; enforces (item, annotator, round) uniqueness."""
    path = Path(path)
    annotations: list[Annotation] = []
    seen: set[tuple[str, str, str]] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            try:
                item_id = obj["item_id"]
                annotator_id = obj["annotator_id"]
                label = Label(obj["label"])
                rnd = Round(obj["round"])
                trust = float(obj.get("trust", 1.0))
            except (TypeError, KeyError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
            key = (item_id, annotator_id, rnd.value)
            if key in seen:
                raise InputError(f"{path}:{lineno}: duplicate annotation {key}")
            seen.add(key)
            try:
                annotations.append(
                    Annotation(
                        item_id=item_id,
                        annotator_id=annotator_id,
                        label=label,
                        round=rnd,
                        trust=trust,
                    )
                )
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    return annotations


def write_annotations(annotations: Iterable[Annotation], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for ann in annotations:
            fh.write(
                json.dumps(
                    {
                        "item_id": ann.item_id,
                        "annotator_id": ann.annotator_id,
                        "label": ann.label.value,
                        "round": ann.round.value,
                        "trust": ann.trust,
                    }
                )
                + "\n"
            )


def write_gold_labels(gold_labels: Iterable[GoldLabel], path: str | Path) -> None:
    """Export as CSV with header ``item_id,label,provenance``."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item_id", "label", "provenance"])
        for gl in gold_labels:
            writer.writerow([gl.item_id, gl.label.value, gl.provenance.value])
