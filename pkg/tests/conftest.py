from __future__ import annotations

import json
from pathlib import Path

import pytest

from tunearena.domain import record_from_dict
from tunearena.domain.types import BattleRecord

DATA_DIR = Path(__file__).parent / "data"


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
        criterion = report.nodeid.split("::")[-1]
        print(f"\n[{status}] acceptance criterion: {criterion}", flush=True)


@pytest.fixture(scope="session")
def reference_battle_text() -> str:
    return (DATA_DIR / "reference_battle.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def reference_battle_dict(reference_battle_text) -> dict:
    return json.loads(reference_battle_text)


@pytest.fixture()
def reference_battle(reference_battle_dict) -> BattleRecord:
    return record_from_dict(reference_battle_dict)
