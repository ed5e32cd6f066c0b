import shutil
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def fixture_store(tmp_path):
    """A store preloaded with the 30-document corpus and annotation log."""
    root = tmp_path / "store"
    root.mkdir()
    shutil.copy(FIXTURES / "docs.jsonl", root / "documents.jsonl")
    shutil.copy(FIXTURES / "annotations.jsonl", root / "annotations.jsonl")
    from opiniontrack.store import DocumentStore
    return DocumentStore(root)
