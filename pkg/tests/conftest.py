"""
Shared fixtures for the review sentiment toolkit tests.
"""
import os
import sys

import pytest

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from loguru import logger  # noqa: E402

from pipeline_config import build_config  # noqa: E402
from text_preprocessor import TextPreprocessor  # noqa: E402

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), "fixtures")
CONFIGS_DIR = os.path.join(PROJECT_ROOT, "configs")


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def configs_dir():
    return CONFIGS_DIR


@pytest.fixture(scope="session")
def preprocessor():
    return TextPreprocessor()


@pytest.fixture
def small_config_data(tmp_path):
    """A quick synthetic experiment: 200 reviews, 20% negative."""
    return {
        "seed": 7,
        "corpus": {"source": "synthetic", "synthetic": {"total": 200, "minority_fraction": 0.2,
                                                          "noise_rate": 0.1}},
        "split": {"test_fraction": 0.25},
        "vectorizer": {"ngram_range": [1, 1], "min_df": 1, "scheme": "tfidf"},
        "balance": {"enabled": True, "k": 3, "rate": "to-balance"},
        "trainer": {"C": 1.0, "class_weights": "none"},
        "output": {"dir": str(tmp_path / "run")},
    }


@pytest.fixture
def small_config(small_config_data):
    return build_config(small_config_data)


@pytest.fixture
def log_messages():
    """Collect loguru messages emitted during a test."""
    messages = []
    handler_id = logger.add(lambda message: messages.append(message.record["message"]), level="DEBUG")
    yield messages
    logger.remove(handler_id)
