"""Synthetic corpus and annotation generator.

Builds a corpus whose message text is driven by a hidden true category and
whose annotators make mistakes mostly on "hard" items, so unanimity
correlates with label correctness. That property is what makes the
generated data useful for exercising every gold-label strategy: majority
labels over the full corpus pick up noise on hard items, while unanimous
crowd labels and agreeing expert pairs stay mostly correct.

Run ``python -m goldsift.synth --out-dir fixtures`` to write the bundled
fixture files.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .annotation import LABELS, Annotation, Label, Round, write_annotations
from .corpus import Message, make_message, write_corpus

PHRASES: dict[Label, list[str]] = {
    Label.A: [
        "i want to die",
        "i want to kill myself",
        "end my life tonight",
        "can't go on like this",
        "depression is eating me alive",
        "i hate myself so much",
        "so tired of living",
        "never want to wake up",
        "cutting again and nobody cares",
        "these dark thoughts won't stop",
    ],
    Label.B: [
        "please seek help",
        "call the crisis hotline",
        "you are not alone",
        "wishing you good health",
        "stay strong and talk to someone",
        "here for you always",
        "support and advice available",
        "ask for help today",
        "sharing a helpful blog on coping",
        "offer of help to anyone struggling",
    ],
    Label.C: [
        "terrible suicide news today",
        "rest in peace to the actor",
        "can't believe the celebrity suicide",
        "so sad to hear about the singer",
        "the suicide bomber attack coverage",
        "another story about overdose in the news",
        "everyone is talking about his death",
        "the documentary about depression aired",
        "tributes after he took his own life",
        "hanged himself says the report",
    ],
    Label.D: [
        "my boyfriend is late again",
        "this homework makes me want to scream",
        "fuck this traffic",
        "miss you girlfriend",
        "the game was so bad tonight",
        "just died laughing at that meme",
        "overdose of coffee this morning",
        "killing it at the gym",
        "my phone battery committed suicide lol",
        "dying to see the new movie",
    ],
}

FILLERS = [
    "today",
    "really",
    "honestly",
    "still",
    "again",
    "right now",
    "as usual",
    "no joke",
    "for real",
    "all day",
]

HANDLES = ["@sam_412", "@mia.k", "@jrow88", "@pat_z", "@lee_m"]
URLS = ["http://t.co/ab12", "https://short.ly/xz9", "www.example.org/p/3"]

# plausible misreadings: which categories a hard item of each true
# category gets confused with
CONFUSABLE: dict[Label, tuple[Label, ...]] = {
    Label.A: (Label.D, Label.C),
    Label.B: (Label.C, Label.D),
    Label.C: (Label.D, Label.B),
    Label.D: (Label.A, Label.C),
}


@dataclass(frozen=True)
class SynthParams:
    n_items: int = 2000
    seed: int = 20240811
    category_priors: tuple[float, float, float, float] = (0.09, 0.13, 0.26, 0.52)
    hard_fraction: float = 0.78
    crowd_noise_easy: float = 0.02
    crowd_noise_hard: float = 0.45
    expert_noise_easy: float = 0.01
    expert_noise_hard: float = 0.15
    crowd_pool: int = 25
    annotators_per_item: int = 5


@dataclass(frozen=True)
class SynthItem:
    message: Message
    true_label: Label
    hard: bool


def _noisy_label(rng: np.random.Generator, true_label: Label, noise: float) -> Label:
    if rng.random() >= noise:
        return true_label
    others = [l for l in LABELS if l is not true_label]
    return others[rng.integers(len(others))]


def _message_text(rng: np.random.Generator, label: Label, hard: bool) -> str:
    own = PHRASES[label]
    parts = [own[rng.integers(len(own))] for _ in range(2)]
    if hard:
        neighbor = CONFUSABLE[label][rng.integers(len(CONFUSABLE[label]))]
        pool = PHRASES[neighbor]
        parts.append(pool[rng.integers(len(pool))])
    parts.append(FILLERS[rng.integers(len(FILLERS))])
    if rng.random() < 0.25:
        parts.insert(0, HANDLES[rng.integers(len(HANDLES))])
    if rng.random() < 0.12:
        parts.append(URLS[rng.integers(len(URLS))])
    return " ".join(parts)


def generate(params: SynthParams) -> tuple[list[SynthItem], list[Annotation]]:
    """Deterministically generate a corpus plus crowd and expert annotations.

    Experts label exactly the items the crowd did not agree on unanimously.
    """
    rng = np.random.default_rng(params.seed)
    priors = np.asarray(params.category_priors, dtype=np.float64)
    priors = priors / priors.sum()
    n_source1 = int(round(params.n_items * 0.6))

    items: list[SynthItem] = []
    annotations: list[Annotation] = []
    for i in range(params.n_items):
        true_label = LABELS[rng.choice(len(LABELS), p=priors)]
        hard = bool(rng.random() < params.hard_fraction)
        text = _message_text(rng, true_label, hard)
        source = "source1" if i < n_source1 else "source2"
        message = make_message(f"t{i:05d}", text, source)
        items.append(SynthItem(message=message, true_label=true_label, hard=hard))

        noise = params.crowd_noise_hard if hard else params.crowd_noise_easy
        workers = rng.choice(params.crowd_pool, size=params.annotators_per_item, replace=False)
        labels = []
        for w in sorted(workers):
            label = _noisy_label(rng, true_label, noise)
            labels.append(label)
            annotations.append(
                Annotation(
                    item_id=message.id,
                    annotator_id=f"crowd{w + 1:02d}",
                    label=label,
                    round=Round.CROWD,
                )
            )
        if len(set(labels)) > 1:  # not unanimous: goes to the expert queue
            noise_e = params.expert_noise_hard if hard else params.expert_noise_easy
            for expert_id in ("expert1", "expert2"):
                annotations.append(
                    Annotation(
                        item_id=message.id,
                        annotator_id=expert_id,
                        label=_noisy_label(rng, true_label, noise_e),
                        round=Round.EXPERT,
                    )
                )
    return items, annotations


def write_fixture(out_dir: str | Path, params: SynthParams) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    items, annotations = generate(params)
    corpus_path = out_dir / "corpus.jsonl"
    annotations_path = out_dir / "annotations.jsonl"
    write_corpus([it.message for it in items], corpus_path)
    write_annotations(annotations, annotations_path)
    return corpus_path, annotations_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Generate a synthetic corpus fixture.")
    parser.add_argument("--out-dir", default="fixtures")
    parser.add_argument("--n", type=int, default=SynthParams.n_items)
    parser.add_argument("--seed", type=int, default=SynthParams.seed)
    args = parser.parse_args(argv)
    corpus_path, annotations_path = write_fixture(
        args.out_dir, SynthParams(n_items=args.n, seed=args.seed)
    )
    print(f"wrote {corpus_path} and {annotations_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
