import json
import pathlib

import pytest

HERE = pathlib.Path(__file__).parent


@pytest.fixture(scope="session")
def oracles():
    return json.loads((HERE / "oracles.json").read_text())


ACCEPTANCE_LINES = []


@pytest.fixture
def report(capsys):
    """Print one acceptance line immediately (bypassing capture) and keep it for the summary."""

    def _report(cid, ok, detail):
        line = f"ACCEPTANCE {cid:<4} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line, flush=True)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
