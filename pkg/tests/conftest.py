import sys

import pytest
from hypothesis import settings

from reeblift import examples

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return examples.unit_disk()


@pytest.fixture(scope="session")
def ann():
    return examples.annulus(1.0, 2.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
    missing = sorted(set(range(1, 10)) - set(results))
    if missing:
        terminalreporter.write_line(f"criteria without a result (deselected or errored): {missing}")
