import sys
from pathlib import Path

import pytest

from phonoscore.lexicon import default_lexicon

TESTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS_DIR))  # makes `oracles` importable from any test


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return TESTS_DIR / "fixtures"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return TESTS_DIR / "golden"


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()
