from __future__ import annotations

from pathlib import Path

import pytest

from texkit.analyzer import Engine, bundled_model_dir
from texkit.core import Span, Token

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def model_dir() -> Path:
    return bundled_model_dir()


@pytest.fixture(scope="session")
def engine(model_dir) -> Engine:
    return Engine.load(model_dir)


@pytest.fixture(scope="session")
def ontology(engine):
    return engine.ontology


@pytest.fixture(scope="session")
def clusters(engine):
    return engine.clusters


@pytest.fixture(scope="session")
def store(engine):
    return engine.store


def make_tokens(*words: str) -> list[Token]:
    """Space-joined token sequence with consistent offsets."""
    out, offset = [], 0
    for w in words:
        out.append(Token(Span(offset, len(w)), w))
        offset += len(w) + 1
    return out
