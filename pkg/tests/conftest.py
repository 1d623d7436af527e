import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.logging import reset_warn_once  # noqa: E402
from flagmirror.combinat import FlagShape  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: expensive acceptance checks (still run by default)")


@pytest.fixture(autouse=True)
def _fresh_warnings():
    reset_warn_once()
    yield
    reset_warn_once()


@pytest.fixture
def gr42() -> FlagShape:
    return FlagShape.grassmannian(4, 2)


@pytest.fixture
def fl421() -> FlagShape:
    return FlagShape(4, (2, 1))
