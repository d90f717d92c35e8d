from __future__ import annotations

from pathlib import Path

import pytest

from goldsift.annotation import aggregate, load_annotations
from goldsift.corpus import load_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_corpus(FIXTURES / "corpus.jsonl")


@pytest.fixture(scope="session")
def fixture_annotations():
    return load_annotations(FIXTURES / "annotations.jsonl")


@pytest.fixture(scope="session")
def fixture_gold(fixture_annotations):
    return aggregate(fixture_annotations)
