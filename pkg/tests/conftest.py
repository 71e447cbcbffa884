import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dramaturg.prompts import builtin_prompt_set

GOLDEN_DIR = Path(__file__).parent / "fixtures" / "golden"


@pytest.fixture(scope="session")
def medea_set():
    return builtin_prompt_set("medea")


@pytest.fixture(scope="session")
def scifi_set():
    return builtin_prompt_set("scifi")


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text(encoding="utf-8")
