from __future__ import annotations

import random
import string

import pytest

from goldsift.corpus import (
    InputError,
    RuleSyntaxError,
    anonymize,
    compile_template,
    default_ruleset,
    filter_match,
    load_corpus,
    load_ruleset,
    make_message,
    match_tokens,
    sample_matched,
)


class TestAnonymize:
    def test_handle_replaced(self):
        assert anonymize("@john call me") == "@SOMEONE call me"

    def test_url_replaced(self):
        assert anonymize("see http://t.co/abc now") == "see HTTP://LINK now"

    def test_identity(self):
        assert anonymize("no handles here") == "no handles here"

    def test_https_and_www(self):
        assert anonymize("https://x.io/a") == "HTTP://LINK"
        assert anonymize("www.example.com/page") == "HTTP://LINK"

    def test_trailing_punctuation_preserved(self):
        assert anonymize("@john, hi") == "@SOMEONE, hi"

    def test_bare_at_untouched(self):
        assert anonymize("@ alone") == "@ alone"

    def test_mid_token_at_untouched(self):
        assert anonymize("mail me a@b") == "mail me a@b"

    def test_idempotent_on_own_output(self):
        once = anonymize("@sam see www.x.io and http://y.co/z @kim")
        assert anonymize(once) == once

    def test_idempotent_random_strings(self):
        rng = random.Random(42)
        alphabet = string.ascii_letters + string.digits + " @./:#'!?"
        pieces = ["@user1", "http://a.b/c", "www.d.e", "plain", "@SOMEONE", "HTTP://LINK"]
        for _ in range(200):
            text = " ".join(
                rng.choice(pieces)
                if rng.random() < 0.4
                else "".join(rng.choices(alphabet, k=rng.randint(1, 10)))
                for _ in range(rng.randint(0, 8))
            )
            once = anonymize(text)
            assert anonymize(once) == once


class TestRuleLanguage:
    def test_alternation(self):
        rule = compile_template("kill/killing/hate myself")
        assert rule.matches(match_tokens("i would kill myself"))
        assert rule.matches(match_tokens("i hate myself sometimes"))
        assert not rule.matches(match_tokens("kill the lights myself later"))

    def test_optional_group(self):
        rule = compile_template("took/taken (my/your/his/her) own life")
        assert rule.matches(match_tokens("he took his own life"))
        assert rule.matches(match_tokens("took own life"))
        assert not rule.matches(match_tokens("took a life"))

    def test_gap_bounded_at_three_tokens(self):
        rule = compile_template("these ... thoughts/feelings")
        assert rule.matches(match_tokens("these thoughts"))
        assert rule.matches(match_tokens("these very dark scary thoughts"))
        assert not rule.matches(match_tokens("these one two three four thoughts"))

    def test_case_insensitive_via_normalization(self):
        rule = compile_template("end my life")
        assert rule.matches(match_tokens("END MY LIFE!"))

    def test_punctuation_becomes_whitespace(self):
        assert match_tokens("hell...depression is bad") == ["hell", "depression", "is", "bad"]
        assert match_tokens("I'd rather") == ["i'd", "rather"]

    def test_empty_template_rejected(self):
        with pytest.raises(RuleSyntaxError):
            compile_template("   ")

    def test_unbalanced_paren_rejected(self):
        with pytest.raises(RuleSyntaxError):
            compile_template("took (my own life")

    def test_empty_alternative_rejected(self):
        with pytest.raises(RuleSyntaxError):
            compile_template("kill//hate myself")

    def test_edge_gap_rejected(self):
        with pytest.raises(RuleSyntaxError):
            compile_template("... thoughts")
        with pytest.raises(RuleSyntaxError):
            compile_template("thoughts ...")

    def test_optional_only_rejected(self):
        with pytest.raises(RuleSyntaxError):
            compile_template("(it)")


class TestRuleset:
    def test_load_single_rule(self, tmp_path):
        path = tmp_path / "rules.txt"
        path.write_text("# comment\nkill/killing/hate myself\n", encoding="utf-8")
        ruleset = load_ruleset(path)
        assert len(ruleset.rules) == 1
        assert ruleset.rules[0].id == "r2"

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "rules.txt"
        path.write_text("# only a comment\n", encoding="utf-8")
        with pytest.raises(InputError):
            load_ruleset(path)

    def test_malformed_pattern_reports_line(self, tmp_path):
        path = tmp_path / "rules.txt"
        path.write_text("ok rule\ntook (my own life\n", encoding="utf-8")
        with pytest.raises(RuleSyntaxError, match=":2:"):
            load_ruleset(path)

    def test_default_ruleset_compiles(self):
        assert len(default_ruleset().rules) >= 20


class TestFilterMatch:
    def test_kill_myself_sample(self):
        ruleset = default_ruleset()
        msg = make_message("m1", "I'd rather kill myself than commit suicide", "synthetic")
        result = filter_match(ruleset, msg)
        assert result.matched
        kill_rule = next(r for r in ruleset.rules if r.template == "kill/killing/hate myself")
        assert kill_rule.id in result.rule_ids

    def test_health_keyword_sample(self):
        ruleset = default_ruleset()
        msg = make_message("m2", "@SOMEONE wishing you good health and happiness", "synthetic")
        result = filter_match(ruleset, msg)
        assert result.matched
        web_rule = next(r for r in ruleset.rules if r.template == "web/blog/health/advice")
        assert web_rule.id in result.rule_ids

    def test_no_rule_word(self):
        msg = make_message("m3", "the weather is nice", "synthetic")
        assert not filter_match(default_ruleset(), msg).matched

    def test_rule_ids_in_rule_order(self):
        ruleset = default_ruleset()
        msg = make_message("m4", "I'd rather kill myself than commit suicide", "synthetic")
        ids = filter_match(ruleset, msg).rule_ids
        positions = [int(i[1:]) for i in ids]
        assert positions == sorted(positions)

    def test_match_monotone_in_rule_addition(self, tmp_path):
        full = default_ruleset()
        texts = [
            "i want to die",
            "offer of help",
            "stop bullying now",
            "nothing relevant at all",
            "just not my day i would like tea",
        ]
        msgs = [make_message(f"m{i}", t, "synthetic") for i, t in enumerate(texts)]
        rng = random.Random(7)
        for _ in range(20):
            subset = tuple(r for r in full.rules if rng.random() < 0.5)
            if not subset:
                continue
            smaller = type(full)(name="sub", rules=subset)
            for msg in msgs:
                if filter_match(smaller, msg).matched:
                    assert filter_match(full, msg).matched


class TestSampleMatched:
    def _corpus(self):
        matched = [make_message(f"a{i}", "i want to die", "synthetic") for i in range(10)]
        unmatched = [make_message(f"b{i}", "sunny morning walk", "synthetic") for i in range(5)]
        return matched + unmatched

    def test_exhaustive_sample(self):
        corpus = self._corpus()
        out = sample_matched(corpus, default_ruleset(), 10, seed=3)
        assert sorted(m.id for m in out) == [f"a{i}" for i in range(10)]

    def test_deterministic(self):
        corpus = self._corpus()
        first = sample_matched(corpus, default_ruleset(), 5, seed=11)
        second = sample_matched(corpus, default_ruleset(), 5, seed=11)
        assert [m.id for m in first] == [m.id for m in second]

    def test_empty_sample(self):
        assert sample_matched(self._corpus(), default_ruleset(), 0, seed=1) == []

    def test_sorted_by_id(self):
        out = sample_matched(self._corpus(), default_ruleset(), 7, seed=5)
        ids = [m.id for m in out]
        assert ids == sorted(ids)

    def test_subset_of_matched_only(self):
        ruleset = default_ruleset()
        out = sample_matched(self._corpus(), ruleset, 8, seed=9)
        assert all(filter_match(ruleset, m).matched for m in out)

    def test_oversample_rejected(self):
        with pytest.raises(InputError):
            sample_matched(self._corpus(), default_ruleset(), 11, seed=1)


class TestCorpusIO:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id": "x1", "text": "@ann hello", "source": "source1"}\n'
            '{"id": "x2", "text": "plain", "source": "source2"}\n',
            encoding="utf-8",
        )
        messages = load_corpus(path)
        assert [m.id for m in messages] == ["x1", "x2"]
        assert messages[0].anon_text == "@SOMEONE hello"

    def test_duplicate_id_rejected_with_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id": "x1", "text": "a", "source": "source1"}\n'
            '{"id": "x1", "text": "b", "source": "source1"}\n',
            encoding="utf-8",
        )
        with pytest.raises(InputError, match=":2:"):
            load_corpus(path)

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "x1", "text": "a", "source": "source1"}\nnot json\n', "utf-8")
        with pytest.raises(InputError, match=":2:"):
            load_corpus(path)

    def test_unknown_source_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "x1", "text": "a", "source": "nowhere"}\n', "utf-8")
        with pytest.raises(InputError, match="source"):
            load_corpus(path)
