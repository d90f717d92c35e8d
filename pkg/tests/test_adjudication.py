from __future__ import annotations

import json

import pytest

from goldsift.adjudication import (
    AdjudicationQueue,
    ItemStatus,
    SubmitConflict,
    SubmitStatus,
    UnknownExpert,
    UnknownItem,
)
from goldsift.annotation import Annotation, InputError, Label, Provenance, Round, cohen_kappa
from goldsift.corpus import make_message


def crowd(item_id: str, labels: str) -> list[Annotation]:
    return [
        Annotation(item_id, f"w{i}", Label(ch), Round.CROWD) for i, ch in enumerate(labels)
    ]


def build_queue(state_dir=None, experts=("expert1", "expert2")):
    """3 disputed items (one with a tied crowd vote) plus 1 unanimous item."""
    messages = [
        make_message("q1", "disputed one", "synthetic"),
        make_message("q2", "disputed two", "synthetic"),
        make_message("q3", "tied crowd vote", "synthetic"),
        make_message("u1", "everyone agrees", "synthetic"),
    ]
    annotations = (
        crowd("q1", "AAADD") + crowd("q2", "BCCCD") + crowd("q3", "AADDC") + crowd("u1", "DDDDD")
    )
    return AdjudicationQueue(messages, annotations, experts=experts, state_dir=state_dir)


class TestQueueConstruction:
    def test_only_disputed_items_enter(self):
        queue = build_queue()
        assert sorted(queue.items) == ["q1", "q2", "q3"]

    def test_crowd_counts_no_identities(self):
        queue = build_queue()
        item = queue.items["q1"]
        assert item.crowd_counts == {Label.A: 3, Label.B: 0, Label.C: 0, Label.D: 2}

    def test_two_experts_required(self):
        with pytest.raises(InputError):
            build_queue(experts=("only_one", "only_one"))

    def test_missing_corpus_message_rejected(self):
        with pytest.raises(InputError):
            AdjudicationQueue([], crowd("q1", "AAADD"))


class TestNextItem:
    def test_lowest_id_first(self):
        queue = build_queue()
        assert queue.next_item("expert1").item_id == "q1"

    def test_seeded_shuffle_order(self):
        messages = [make_message(f"q{i}", f"text {i}", "synthetic") for i in range(8)]
        annotations = [a for i in range(8) for a in crowd(f"q{i}", "AAADD")]
        shuffled = AdjudicationQueue(messages, annotations, order_seed=13)
        again = AdjudicationQueue(messages, annotations, order_seed=13)
        assert shuffled.order == again.order
        assert shuffled.order != sorted(shuffled.order)
        assert sorted(shuffled.order) == [f"q{i}" for i in range(8)]

    def test_done_after_labeling_everything(self):
        queue = build_queue()
        for item_id in ("q1", "q2", "q3"):
            queue.submit("expert1", item_id, Label.A)
        assert queue.next_item("expert1") is None
        assert queue.next_item("expert2").item_id == "q1"

    def test_unknown_expert(self):
        with pytest.raises(UnknownExpert):
            build_queue().next_item("stranger")

    def test_half_labeled_item_still_served_to_other_expert(self):
        queue = build_queue()
        queue.submit("expert1", "q1", Label.A)
        assert queue.next_item("expert2").item_id == "q1"


class TestSubmit:
    def test_agreement_resolves_r2u(self):
        queue = build_queue()
        first = queue.submit("expert1", "q1", Label.A)
        assert first.status is SubmitStatus.RECORDED
        second = queue.submit("expert2", "q1", Label.A)
        assert second.status is SubmitStatus.RESOLVED
        assert second.gold.provenance is Provenance.R2U
        assert second.gold.label is Label.A

    def test_disagreement_falls_back_to_majority(self):
        queue = build_queue()
        queue.submit("expert1", "q1", Label.A)
        outcome = queue.submit("expert2", "q1", Label.D)
        assert outcome.status is SubmitStatus.CONFLICT_RESOLVED
        assert outcome.gold.label is Label.A  # crowd majority of AAADD
        assert outcome.gold.provenance is Provenance.R2S

    def test_disagreement_over_tie_drops(self):
        queue = build_queue()
        queue.submit("expert1", "q3", Label.B)
        outcome = queue.submit("expert2", "q3", Label.C)
        assert outcome.status is SubmitStatus.DROPPED
        assert queue.items["q3"].status is ItemStatus.DROPPED

    def test_idempotent_resubmission(self):
        queue = build_queue()
        queue.submit("expert1", "q1", Label.A)
        again = queue.submit("expert1", "q1", Label.A)
        assert again.status is SubmitStatus.RECORDED
        queue.submit("expert2", "q1", Label.A)
        # idempotent replay after resolution reports the resolution
        final = queue.submit("expert1", "q1", Label.A)
        assert final.status is SubmitStatus.RESOLVED

    def test_differing_relabel_conflicts(self):
        queue = build_queue()
        queue.submit("expert1", "q1", Label.A)
        with pytest.raises(SubmitConflict):
            queue.submit("expert1", "q1", Label.B)

    def test_unknown_item(self):
        with pytest.raises(UnknownItem):
            build_queue().submit("expert1", "nope", Label.A)

    def test_unanimous_item_not_submittable(self):
        with pytest.raises(UnknownItem):
            build_queue().submit("expert1", "u1", Label.D)

    def test_status_partition_invariant(self):
        queue = build_queue()
        total = len(queue.items)
        steps = [
            ("expert1", "q1", Label.A),
            ("expert2", "q1", Label.A),
            ("expert1", "q3", Label.B),
            ("expert2", "q3", Label.C),
            ("expert1", "q2", Label.C),
        ]
        for expert, item, label in steps:
            queue.submit(expert, item, label)
            counts = queue.stats().status_counts
            assert sum(counts.values()) == total

    def test_resolved_gold_write_once(self):
        queue = build_queue()
        queue.submit("expert1", "q1", Label.A)
        queue.submit("expert2", "q1", Label.A)
        gold_before = queue.items["q1"].gold
        with pytest.raises(SubmitConflict):
            queue.submit("expert1", "q1", Label.D)
        assert queue.items["q1"].gold == gold_before


class TestStats:
    def test_empty_state(self):
        stats = build_queue().stats()
        assert stats.kappa is None
        assert stats.status_counts["pending"] == 3

    def test_perfect_agreement_kappa_one(self):
        queue = build_queue()
        for item, label in (("q1", Label.A), ("q2", Label.C)):
            queue.submit("expert1", item, label)
            queue.submit("expert2", item, label)
        assert queue.stats().kappa == 1.0

    def test_degenerate_marginals_sentinel(self):
        queue = build_queue()
        for item in ("q1", "q2"):
            queue.submit("expert1", item, Label.A)
            queue.submit("expert2", item, Label.A)
        assert queue.stats().kappa is None  # both raters constant

    def test_matches_cohen_kappa_function(self):
        queue = build_queue()
        picks = [("q1", Label.A, Label.A), ("q2", Label.C, Label.B), ("q3", Label.A, Label.D)]
        for item, l1, l2 in picks:
            queue.submit("expert1", item, l1)
            queue.submit("expert2", item, l2)
        expected = cohen_kappa(
            {item: l1 for item, l1, _ in picks},
            {item: l2 for item, _, l2 in picks},
        ).kappa
        assert queue.stats().kappa == expected

    def test_resolved_distribution(self):
        queue = build_queue()
        queue.submit("expert1", "q1", Label.A)
        queue.submit("expert2", "q1", Label.A)
        stats = queue.stats()
        assert stats.resolved_by_label["A"] == 1
        assert stats.resolved_by_provenance["R2U"] == 1


class TestPersistence:
    def test_event_log_replay_identical(self, tmp_path):
        state = tmp_path / "state"
        queue = build_queue(state_dir=state)
        queue.submit("expert1", "q1", Label.A)
        queue.submit("expert2", "q1", Label.D)
        queue.submit("expert1", "q2", Label.C)

        replayed = build_queue(state_dir=state)
        assert {i: it.status for i, it in replayed.items.items()} == {
            i: it.status for i, it in queue.items.items()
        }
        assert replayed.expert_pairs() == queue.expert_pairs()
        assert replayed.resolved_gold() == queue.resolved_gold()

    def test_restart_loses_no_label(self, tmp_path):
        state = tmp_path / "state"
        queue = build_queue(state_dir=state)
        queue.submit("expert1", "q1", Label.A)
        del queue  # hard stop: no shutdown hook runs

        revived = build_queue(state_dir=state)
        assert revived.items["q1"].labels == {"expert1": Label.A}
        outcome = revived.submit("expert2", "q1", Label.A)
        assert outcome.status is SubmitStatus.RESOLVED

    def test_idempotent_submissions_not_relogged(self, tmp_path):
        state = tmp_path / "state"
        queue = build_queue(state_dir=state)
        for _ in range(5):
            queue.submit("expert1", "q1", Label.A)
        events = (state / "events.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(events) == 1

    def test_snapshot_plus_tail_replay(self, tmp_path):
        state = tmp_path / "state"
        queue = build_queue(state_dir=state, experts=("e1", "e2"))
        queue._snapshot_every = 2
        queue.submit("e1", "q1", Label.A)
        queue.submit("e2", "q1", Label.A)  # snapshot fires at seq 2
        queue.submit("e1", "q2", Label.B)  # tail event after snapshot
        assert (state / "snapshot.json").exists()

        replayed = build_queue(state_dir=state, experts=("e1", "e2"))
        assert replayed.expert_pairs() == queue.expert_pairs()
        assert replayed.items["q2"].labels == {"e1": Label.B}

    def test_file_expert_rows_seed_state(self, tmp_path):
        messages = [make_message("q1", "text", "synthetic")]
        annotations = crowd("q1", "AAADD") + [
            Annotation("q1", "expert1", Label.A, Round.EXPERT)
        ]
        queue = AdjudicationQueue(messages, annotations, state_dir=tmp_path / "s")
        assert queue.items["q1"].status is ItemStatus.HALF_LABELED

    def test_stale_state_dir_rejected(self, tmp_path):
        state = tmp_path / "state"
        queue = build_queue(state_dir=state)
        queue.submit("expert1", "q1", Label.A)
        other_messages = [make_message("zz", "different corpus", "synthetic")]
        other_annotations = crowd("zz", "AAADD")
        with pytest.raises(InputError, match="different inputs"):
            AdjudicationQueue(other_messages, other_annotations, state_dir=state)

    def test_expert_row_for_unanimous_item_rejected(self):
        messages = [make_message("u1", "text", "synthetic")]
        annotations = crowd("u1", "AAAAA") + [
            Annotation("u1", "expert1", Label.A, Round.EXPERT)
        ]
        with pytest.raises(InputError):
            AdjudicationQueue(messages, annotations)
