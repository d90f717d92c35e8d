"""Message storage, anonymization, and the rule-based candidate filter.

The filter selects candidate messages with a small pattern language, one
pattern per line in a rule file:

* plain words match tokens literally and case-insensitively,
* ``/`` separates alternatives (``kill/killing/hate myself``),
* ``(...)`` marks an optional word or alternation (``can't take (it) anymore``),
* ``...`` is a bounded gap of 0-3 tokens (``these ... thoughts/feelings``).

Matching runs on the anonymized text, over a normalized token stream: the
text is lowercased, every character other than letters, digits,
underscores and apostrophes becomes whitespace, and the result is split on
whitespace. This happens before any lemmatization, so rule words must be
surface forms.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InputError

SOURCES = ("source1", "source2", "synthetic")

_HANDLE_RE = re.compile(r"(?:^|(?<=\s))@\w+")
_URL_RE = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)
_MATCH_NORM_RE = re.compile(r"[^\w'\s]")


def anonymize(raw_text: str) -> str:
    """Replace @-handles with ``@SOMEONE`` and URLs with ``HTTP://LINK``.

    Total and idempotent; all other characters are preserved byte-for-byte.
    """
    text = _HANDLE_RE.sub("@SOMEONE", raw_text)
    return _URL_RE.sub("HTTP://LINK", text)


@dataclass(frozen=True)
class Message:
    """One anonymized short text with a stable id and source tag."""

    id: str
    raw_text: str
    anon_text: str
    source: str


def make_message(id: str, text: str, source: str) -> Message:
    if source not in SOURCES:
        raise InputError(f"unknown source {source!r} (expected one of {SOURCES})")
    return Message(id=id, raw_text=text, anon_text=anonymize(text), source=source)


def load_corpus(path: str | Path) -> list[Message]:
    """Read a JSON Lines corpus file: ``{"id": str, "text": str, "source": str}``."""
    path = Path(path)
    messages: list[Message] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            try:
                msg_id, text, source = obj["id"], obj["text"], obj["source"]
            except (TypeError, KeyError) as exc:
                raise InputError(f"{path}:{lineno}: missing field {exc}") from exc
            if not isinstance(msg_id, str) or not msg_id:
                raise InputError(f"{path}:{lineno}: id must be a non-empty string")
            if msg_id in seen:
                raise InputError(f"{path}:{lineno}: duplicate message id {msg_id!r}")
            seen.add(msg_id)
            try:
                messages.append(make_message(msg_id, text, source))
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    return messages


def write_corpus(messages: list[Message], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for msg in messages:
            fh.write(json.dumps({"id": msg.id, "text": msg.raw_text, "source": msg.source}) + "\n")


class RuleSyntaxError(InputError):
    """Malformed rule pattern; message carries the source line number."""


@dataclass(frozen=True)
class RulePattern:
    """A compiled filter pattern."""

    id: str
    template: str
    regex: re.Pattern

    def matches(self, tokens: list[str]) -> bool:
        return self.regex.search(" ".join(tokens) + " ") is not None


@dataclass(frozen=True)
class RuleSet:
    name: str
    rules: tuple[RulePattern, ...]


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    rule_ids: tuple[str, ...]


_GAP_CHUNK = r"(?:[^ ]+ ){0,3}"


def _compile_alternation(part: str, where: str) -> str:
    words = part.split("/")
    if any(not w for w in words):
        raise RuleSyntaxError(f"{where}: empty alternative in {part!r}")
    for w in words:
        if "(" in w or ")" in w:
            raise RuleSyntaxError(f"{where}: stray parenthesis in {w!r}")
    if len(words) == 1:
        return re.escape(words[0].lower())
    return "(?:" + "|".join(re.escape(w.lower()) for w in words) + ")"


def compile_template(template: str, rule_id: str = "rule") -> RulePattern:
    """Compile one pattern line into a :class:`RulePattern`.

    Raises :class:`RuleSyntaxError` for empty templates, unbalanced or nested
    parentheses, empty alternatives, gaps at the edges, or templates with no
    required word.
    """
    parts = template.split()
    if not parts:
        raise RuleSyntaxError(f"{rule_id}: empty pattern")
    chunks: list[str] = []
    required = 0
    for pos, part in enumerate(parts):
        if part == "...":
            if pos == 0 or pos == len(parts) - 1:
                raise RuleSyntaxError(f"{rule_id}: gap '...' at pattern edge")
            chunks.append(_GAP_CHUNK)
        elif part.startswith("("):
            if not part.endswith(")") or len(part) < 3:
                raise RuleSyntaxError(f"{rule_id}: unbalanced parenthesis in {part!r}")
            inner = part[1:-1]
            chunks.append("(?:" + _compile_alternation(inner, rule_id) + " )?")
        elif ")" in part or "(" in part:
            raise RuleSyntaxError(f"{rule_id}: unbalanced parenthesis in {part!r}")
        else:
            chunks.append(_compile_alternation(part, rule_id) + " ")
            required += 1
    if required == 0:
        raise RuleSyntaxError(f"{rule_id}: pattern has no required word")
    regex = re.compile(r"(?:^|(?<= ))" + "".join(chunks))
    return RulePattern(id=rule_id, template=template, regex=regex)


def load_ruleset(path: str | Path, name: str = "C0") -> RuleSet:
    """Load a rule file: one pattern per line, ``#`` comments and blanks skipped."""
    path = Path(path)
    rules: list[RulePattern] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rules.append(compile_template(line, rule_id=f"r{lineno}"))
            except RuleSyntaxError as exc:
                raise RuleSyntaxError(f"{path}:{lineno}: {exc}") from exc
    if not rules:
        raise InputError(f"{path}: rule file contains no patterns")
    return RuleSet(name=name, rules=tuple(rules))


def default_ruleset() -> RuleSet:
    """The candidate filter shipped with the package."""
    with resources.as_file(resources.files("goldsift.data") / "c0_rules.txt") as path:
        return load_ruleset(path)


def match_tokens(text: str) -> list[str]:
    """Normalize text to the token stream the filter matches against."""
    text = text.lower().replace("’", "'")
    return _MATCH_NORM_RE.sub(" ", text).split()


def filter_match(ruleset: RuleSet, msg: Message) -> MatchResult:
    """Match a message against every rule; rule ids come back in rule order."""
    tokens = match_tokens(msg.anon_text)
    hits = tuple(rule.id for rule in ruleset.rules if rule.matches(tokens))
    return MatchResult(matched=bool(hits), rule_ids=hits)


def sample_matched(corpus: list[Message], ruleset: RuleSet, n: int, seed: int) -> list[Message]:
    """Uniform sample without replacement from the filter-matched messages.

    Deterministic for a fixed seed; the result is sorted by id.
    """
    if n < 0:
        raise InputError("sample size must be non-negative")
    matched = [m for m in corpus if filter_match(ruleset, m).matched]
    if n > len(matched):
        raise InputError(f"requested {n} messages but only {len(matched)} matched")
    picked = random.Random(seed).sample(matched, n)
    return sorted(picked, key=lambda m: m.id)
