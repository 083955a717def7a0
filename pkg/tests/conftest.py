import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
ML100K = Path(os.environ.get("MCREC_ML100K", ROOT / "data" / "ml-100k" / "u.data"))

_criteria: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str = ""):
    _criteria.append((name, bool(passed), detail))


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture(scope="session")
def ml100k_path():
    if not ML100K.is_file():
        pytest.fail(f"ML100K not found at {ML100K}; run scripts/fetch_ml100k.py or set MCREC_ML100K")
    return ML100K
