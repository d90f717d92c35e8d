"""Deterministic text preparation: tokenize, lemmatize, n-grams, vocabulary.

Everything here is a pure function with no runtime NLP dependencies; the
lemmatizer is a bundled irregular-form lexicon plus a handful of suffix
rules, which is deliberately cruder than a dictionary lemmatizer but fully
reproducible.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InputError

EMOTICONS = frozenset({":)", ":(", ":/", ";)", ":d", "d:"})

_STRIP_CHARS = '.,!?"();:'
_VOWELS = frozenset("aeiou")


def tokenize(anon_text: str) -> list[str]:
    """Split anonymized text into lowercase tokens.

    Emoticons survive whole; other tokens lose surrounding ``.,!?"();:``
    punctuation but keep internal apostrophes and ``#``, so contractions,
    hashtags, ``@someone`` and ``http://link`` stay single tokens.
    """
    tokens: list[str] = []
    for raw in anon_text.lower().split():
        if raw in EMOTICONS:
            tokens.append(raw)
            continue
        word = raw.strip(_STRIP_CHARS)
        if word:
            tokens.append(word)
    return tokens


def load_lexicon(path: str | Path) -> dict[str, str]:
    """Read a ``form<TAB>lemma`` lexicon file; ``#`` comments and blanks allowed."""
    path = Path(path)
    lexicon: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise InputError(f"{path}:{lineno}: expected 'form<TAB>lemma'")
            lexicon[parts[0]] = parts[1]
    return lexicon


_default_lexicon: dict[str, str] | None = None


def default_lexicon() -> dict[str, str]:
    global _default_lexicon
    if _default_lexicon is None:
        with resources.as_file(resources.files("goldsift.data") / "lemmas.tsv") as path:
            _default_lexicon = load_lexicon(path)
    return _default_lexicon


def _undouble(stem: str) -> str:
    # kill, miss, buzz keep their doubled letter; hopp-, runn-, committ- do not
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and stem[-1].isalpha()
        and stem[-1] not in _VOWELS
        and stem[-1] not in "lsz"
    ):
        return stem[:-1]
    return stem


def _es_plural(token: str) -> bool:
    # sibilant stems take -es: boxes, misses, watches, wishes
    if token.endswith(("ches", "shes")):
        return len(token) >= 6
    return token.endswith("es") and len(token) >= 5 and token[-3] in "sxz"


def _strip_suffix(token: str) -> str:
    if token.endswith("'s") and len(token) >= 4:
        return token[:-2]
    if token.endswith(("ies", "ied")) and len(token) >= 4:
        return token[:-3] + "y"
    if _es_plural(token):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")) and len(token) >= 4:
        return token[:-1]
    if token.endswith("ing") and len(token) >= 6:
        return _undouble(token[:-3])
    if token.endswith("ed") and len(token) >= 5:
        return _undouble(token[:-2])
    return token


def lemmatize(tokens: list[str], lexicon: dict[str, str] | None = None) -> list[str]:
    """Map each token through the irregular-form lexicon, then suffix rules.

    Tokens starting with ``@``, ``#`` or ``http`` pass through unchanged.
    A lexicon hit short-circuits the suffix rules, so lexicon values are
    fixed points by construction.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    out: list[str] = []
    for token in tokens:
        if token.startswith(("@", "#", "http")):
            out.append(token)
            continue
        hit = lexicon.get(token)
        out.append(hit if hit is not None else _strip_suffix(token))
    return out


def extract_ngrams(tokens: list[str]) -> list[str]:
    """All contiguous unigrams, bigrams and trigrams, space-joined.

    A stream of length L yields ``L + max(L-1, 0) + max(L-2, 0)`` n-grams
    (duplicates included).
    """
    grams = list(tokens)
    grams.extend(" ".join(tokens[i : i + 2]) for i in range(len(tokens) - 1))
    grams.extend(" ".join(tokens[i : i + 3]) for i in range(len(tokens) - 2))
    return grams


@dataclass(frozen=True)
class Vocabulary:
    """Ordered n-gram feature space: document frequency descending, ties lexicographic."""

    entries: tuple[str, ...]
    doc_freqs: tuple[int, ...]
    index: dict[str, int]

    @property
    def dimension(self) -> int:
        return len(self.entries)


def build_vocabulary(corpus: list[list[str]], max_size: int = 10_000) -> Vocabulary:
    """Rank n-grams by document frequency and keep the top ``max_size``."""
    if not corpus:
        raise InputError("cannot build a vocabulary from an empty corpus")
    if max_size < 1:
        raise InputError("max_size must be at least 1")
    df: Counter[str] = Counter()
    for tokens in corpus:
        df.update(set(extract_ngrams(tokens)))
    ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:max_size]
    entries = tuple(ng for ng, _ in ranked)
    return Vocabulary(
        entries=entries,
        doc_freqs=tuple(freq for _, freq in ranked),
        index={ng: i for i, ng in enumerate(entries)},
    )


@dataclass(frozen=True)
class FeatureVector:
    """Binary presence encoding: sorted active positions in the vocabulary."""

    dimension: int
    active: tuple[int, ...]


def vectorize(tokens: list[str], vocab: Vocabulary) -> FeatureVector:
    """Binary presence vector; out-of-vocabulary n-grams are ignored."""
    positions = {vocab.index[g] for g in extract_ngrams(tokens) if g in vocab.index}
    return FeatureVector(dimension=vocab.dimension, active=tuple(sorted(positions)))


def write_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Export as CSV ``rank,ngram,doc_freq`` (rank starts at 1)."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "ngram", "doc_freq"])
        for rank, (ngram, freq) in enumerate(zip(vocab.entries, vocab.doc_freqs), start=1):
            writer.writerow([rank, ngram, freq])
