from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles.py importable everywhere

from dramaturg.affect import ScorerDescriptor
from dramaturg.report import AnalysisConfig

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


def fixture_config(window: int = 150, **kwargs) -> AnalysisConfig:
    defaults = dict(
        window=window,
        sentiment=ScorerDescriptor(
            kind="lexicon_sentiment", resource=str(FIXTURES / "lexicon_sentiment.csv")
        ),
        emotion=ScorerDescriptor(
            kind="lexicon_emotion", resource=str(FIXTURES / "lexicon_emotion.csv")
        ),
    )
    defaults.update(kwargs)
    return AnalysisConfig(**defaults)


@pytest.fixture()
def analysis_config() -> AnalysisConfig:
    return fixture_config()
