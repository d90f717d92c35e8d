"""Expert adjudication of crowd disagreements.

Items the crowd could not label unanimously form a queue served to exactly
two experts. Matching expert labels resolve an item (``R2U``); mismatches
fall back to the crowd majority (``R2S``) or drop the item when the crowd
vote was tied. Every accepted label is appended to a JSON-Lines event log
(with a periodic snapshot), so a crashed session replays to the identical
state.

Experts label independently: nothing returned to one expert reveals the
other's labels before an item resolves.
"""

from __future__ import annotations

import json
import os
import random
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .annotation import (
    LABELS,
    Annotation,
    GoldLabel,
    Label,
    Provenance,
    Round,
    cohen_kappa,
    distribution,
    majority_label,
    merge_expert,
    unanimous_label,
)
from .corpus import Message
from .errors import InputError


class ItemStatus(str, Enum):
    PENDING = "pending"
    HALF_LABELED = "half_labeled"
    RESOLVED = "resolved"
    DROPPED = "dropped"


class SubmitStatus(str, Enum):
    RECORDED = "recorded"
    RESOLVED = "resolved"
    CONFLICT_RESOLVED = "conflict_resolved"
    DROPPED = "dropped"


@dataclass(frozen=True)
class SubmitOutcome:
    status: SubmitStatus
    gold: GoldLabel | None = None


class SubmitConflict(Exception):
    """Submission rejected: differing relabel or already-decided item (HTTP 409)."""


class UnknownExpert(InputError):
    pass


class UnknownItem(InputError):
    pass


@dataclass
class QueueItem:
    """One crowd-disagreed item awaiting expert labels."""

    item_id: str
    anon_text: str
    crowd_counts: dict[Label, int]
    crowd_majority: Label | None
    status: ItemStatus = ItemStatus.PENDING
    labels: dict[str, Label] = field(default_factory=dict)
    gold: GoldLabel | None = None


@dataclass(frozen=True)
class QueueStats:
    kappa: float | None
    percent_agreement: float | None
    status_counts: dict[str, int]
    resolved_by_label: dict[str, int]
    resolved_by_provenance: dict[str, int]
    total: int


class AdjudicationQueue:
    """Queue state machine, optionally persisted to an event log directory.

    Thread-safe: all mutations happen under one lock, so the merge decision
    for an item fires exactly once even with both experts submitting
    concurrently.
    """

    def __init__(
        self,
        messages: list[Message],
        annotations: list[Annotation],
        experts: tuple[str, str] = ("expert1", "expert2"),
        state_dir: str | Path | None = None,
        snapshot_every: int = 50,
        order_seed: int | None = None,
    ) -> None:
        if len(set(experts)) != 2:
            raise InputError(f"exactly two distinct experts required, got {experts!r}")
        self.experts = tuple(sorted(experts))
        self._lock = threading.RLock()
        self._snapshot_every = snapshot_every
        self.items: dict[str, QueueItem] = {}

        by_message = {m.id: m for m in messages}
        crowd: dict[str, list[Annotation]] = {}
        for ann in annotations:
            if ann.round is Round.CROWD:
                crowd.setdefault(ann.item_id, []).append(ann)
        for item_id in sorted(crowd):
            dist = distribution(crowd[item_id])
            if unanimous_label(dist) is not None:
                continue  # unanimity needs no adjudication
            if item_id not in by_message:
                raise InputError(f"annotated item {item_id!r} missing from corpus")
            self.items[item_id] = QueueItem(
                item_id=item_id,
                anon_text=by_message[item_id].anon_text,
                crowd_counts=dict(dist.counts),
                crowd_majority=majority_label(dist),
            )
        # id order by default (deterministic); seeded shuffle on request
        self.order = sorted(self.items)
        if order_seed is not None:
            random.Random(order_seed).shuffle(self.order)

        self._state_dir = Path(state_dir) if state_dir is not None else None
        self._seq = 0
        if self._state_dir is not None:
            self._state_dir.mkdir(parents=True, exist_ok=True)
            self._replay()

        # expert labels already present in the annotation file count as applied
        for ann in annotations:
            if ann.round is Round.EXPERT:
                if ann.item_id not in self.items:
                    raise InputError(
                        f"expert annotation for {ann.item_id!r}, which is not in the queue"
                    )
                if ann.annotator_id not in self.experts:
                    raise InputError(f"expert annotation by unregistered {ann.annotator_id!r}")
                self._apply(ann.annotator_id, ann.item_id, ann.label)

    # -- persistence ----------------------------------------------------

    @property
    def _events_path(self) -> Path:
        assert self._state_dir is not None
        return self._state_dir / "events.jsonl"

    @property
    def _snapshot_path(self) -> Path:
        assert self._state_dir is not None
        return self._state_dir / "snapshot.json"

    def _replay(self) -> None:
        snapshot_seq = 0
        if self._snapshot_path.exists():
            snap = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            snapshot_seq = int(snap["seq"])
            for expert_id, item_id, label in snap["labels"]:
                self._check_replayable(expert_id, item_id)
                self._apply(expert_id, item_id, Label(label))
        self._seq = snapshot_seq
        if self._events_path.exists():
            with self._events_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    event = json.loads(line)
                    if event["seq"] <= snapshot_seq:
                        continue
                    self._check_replayable(event["expert_id"], event["item_id"])
                    self._apply(event["expert_id"], event["item_id"], Label(event["label"]))
                    self._seq = event["seq"]

    def _check_replayable(self, expert_id: str, item_id: str) -> None:
        if item_id not in self.items:
            raise InputError(
                f"event log references {item_id!r}, which is not in this queue; "
                "the state directory belongs to different inputs"
            )
        if expert_id not in self.experts:
            raise InputError(f"event log references unregistered expert {expert_id!r}")

    def _append_event(self, expert_id: str, item_id: str, label: Label) -> None:
        if self._state_dir is None:
            return
        self._seq += 1
        record = {"seq": self._seq, "expert_id": expert_id, "item_id": item_id, "label": label.value}
        with self._events_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        if self._seq % self._snapshot_every == 0:
            self._write_snapshot()

    def _write_snapshot(self) -> None:
        assert self._state_dir is not None
        labels = sorted(
            (expert_id, item.item_id, label.value)
            for item in self.items.values()
            for expert_id, label in item.labels.items()
        )
        tmp = self._snapshot_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps({"seq": self._seq, "labels": labels}), encoding="utf-8")
        os.replace(tmp, self._snapshot_path)

    # -- state transitions ----------------------------------------------

    def _apply(self, expert_id: str, item_id: str, label: Label) -> tuple[SubmitOutcome, bool]:
        """Apply one label; returns the outcome and whether state changed."""
        item = self.items[item_id]
        existing = item.labels.get(expert_id)
        if existing is not None:
            if existing is label:
                return self._outcome_for(item), False
            raise SubmitConflict(
                f"expert {expert_id!r} already labeled {item_id!r} as {existing.value}"
            )
        if item.status in (ItemStatus.RESOLVED, ItemStatus.DROPPED):
            raise SubmitConflict(f"item {item_id!r} is already {item.status.value}")
        item.labels[expert_id] = label
        if len(item.labels) < 2:
            item.status = ItemStatus.HALF_LABELED
            return SubmitOutcome(status=SubmitStatus.RECORDED), True
        first, second = (item.labels[e] for e in self.experts)
        gold = merge_expert(item_id, item.crowd_majority, first, second)
        if gold is None:
            item.status = ItemStatus.DROPPED
            return SubmitOutcome(status=SubmitStatus.DROPPED), True
        item.gold = gold
        item.status = ItemStatus.RESOLVED
        return self._outcome_for(item), True

    def _outcome_for(self, item: QueueItem) -> SubmitOutcome:
        if item.status is ItemStatus.DROPPED:
            return SubmitOutcome(status=SubmitStatus.DROPPED)
        if item.status is ItemStatus.RESOLVED:
            assert item.gold is not None
            status = (
                SubmitStatus.RESOLVED
                if item.gold.provenance is Provenance.R2U
                else SubmitStatus.CONFLICT_RESOLVED
            )
            return SubmitOutcome(status=status, gold=item.gold)
        return SubmitOutcome(status=SubmitStatus.RECORDED)

    def _check_expert(self, expert_id: str) -> None:
        if expert_id not in self.experts:
            raise UnknownExpert(f"unknown expert {expert_id!r}")

    # -- public API -------------------------------------------------------

    def next_item(self, expert_id: str) -> QueueItem | None:
        """Lowest-id open item this expert has not labeled; ``None`` when done."""
        self._check_expert(expert_id)
        with self._lock:
            for item_id in self.order:
                item = self.items[item_id]
                if item.status in (ItemStatus.PENDING, ItemStatus.HALF_LABELED):
                    if expert_id not in item.labels:
                        return item
            return None

    def submit(self, expert_id: str, item_id: str, label: Label) -> SubmitOutcome:
        """Record one expert label; resubmitting the identical triple is a no-op."""
        self._check_expert(expert_id)
        with self._lock:
            if item_id not in self.items:
                raise UnknownItem(f"item {item_id!r} is not in the adjudication queue")
            outcome, changed = self._apply(expert_id, item_id, label)
            if changed:
                self._append_event(expert_id, item_id, label)
            return outcome

    def expert_pairs(self) -> dict[str, tuple[Label, Label]]:
        """Labels of doubly-labeled items, ordered by sorted expert id."""
        with self._lock:
            return {
                item.item_id: tuple(item.labels[e] for e in self.experts)
                for item in self.items.values()
                if len(item.labels) == 2
            }

    def stats(self) -> QueueStats:
        """Live agreement and progress counters."""
        with self._lock:
            pairs = self.expert_pairs()
            kappa = None
            agreement = None
            if len(pairs) >= 2:
                report = cohen_kappa(
                    {i: p[0] for i, p in pairs.items()},
                    {i: p[1] for i, p in pairs.items()},
                )
                agreement = report.percent_unanimous
                n = len(pairs)
                marg1 = {l: sum(1 for p in pairs.values() if p[0] is l) for l in LABELS}
                marg2 = {l: sum(1 for p in pairs.values() if p[1] is l) for l in LABELS}
                degenerate = sum(marg1[l] * marg2[l] for l in LABELS) == n * n
                kappa = None if degenerate else report.kappa
            status_counts = {status.value: 0 for status in ItemStatus}
            resolved_by_label = {label.value: 0 for label in LABELS}
            resolved_by_provenance = {"R2U": 0, "R2S": 0}
            for item in self.items.values():
                status_counts[item.status.value] += 1
                if item.gold is not None:
                    resolved_by_label[item.gold.label.value] += 1
                    resolved_by_provenance[item.gold.provenance.value] += 1
            return QueueStats(
                kappa=kappa,
                percent_agreement=agreement,
                status_counts=status_counts,
                resolved_by_label=resolved_by_label,
                resolved_by_provenance=resolved_by_provenance,
                total=len(self.items),
            )

    def resolved_gold(self) -> list[GoldLabel]:
        with self._lock:
            return [
                self.items[i].gold
                for i in self.order
                if self.items[i].gold is not None
            ]

    def expert_annotations(self) -> list[Annotation]:
        """All recorded expert labels as annotation rows."""
        with self._lock:
            rows = [
                Annotation(
                    item_id=item.item_id,
                    annotator_id=expert_id,
                    label=label,
                    round=Round.EXPERT,
                    trust=1.0,
                )
                for item in self.items.values()
                for expert_id, label in item.labels.items()
            ]
            return sorted(rows, key=lambda a: (a.item_id, a.annotator_id))
