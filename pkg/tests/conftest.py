import json
from pathlib import Path

import pytest

from physquiz.knowledge import FixtureStore

TESTS_DIR = Path(__file__).parent


@pytest.fixture(scope="session")
def store() -> FixtureStore:
    return FixtureStore.bundled()


@pytest.fixture(scope="session")
def speed_record(store):
    return store.lookup("Q3711325")


@pytest.fixture(scope="session")
def expected_stage_flags() -> dict:
    with open(TESTS_DIR / "data" / "expected_stage_flags.json", encoding="utf-8") as fh:
        return json.load(fh)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of a run."""
    outcomes: dict[str, str] = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.rsplit("::", 1)[-1]
            if outcomes.get(name) != "FAIL":
                outcomes[name] = verdict
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(outcomes):
        label = name.removeprefix("test_").replace("_", " ")
        terminalreporter.write_line(f"{outcomes[name]}: {label}")
