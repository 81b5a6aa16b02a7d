from pathlib import Path

import pytest

from t3co.instance import load_native_file

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fig1():
    return load_native_file(FIXTURES / "fig1.t3i")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
