"""Shared fixtures: committed data files loaded once per session."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pmr.index import ingest_corpus_file
from pmr.ontology import load_tables
from pmr.profile import parse_topics

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def ontology_dir() -> Path:
    return DATA_DIR / "ontology"


@pytest.fixture(scope="session")
def tables(ontology_dir):
    return load_tables(ontology_dir)


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return DATA_DIR / "corpus.jsonl"


@pytest.fixture(scope="session")
def index(corpus_path):
    return ingest_corpus_file(corpus_path)


@pytest.fixture(scope="session")
def topics():
    return parse_topics(DATA_DIR / "topics.json")


@pytest.fixture(scope="session")
def qrels_path() -> Path:
    return DATA_DIR / "qrels.txt"
