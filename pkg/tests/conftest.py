import os

import pytest
from hypothesis import HealthCheck, settings

from hsecagg import GroupParams, small_group

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def toy():
    """p = 23, q = 11, g = 4."""
    return GroupParams(23, 11, 4)


@pytest.fixture(scope="session")
def g64():
    return small_group(64)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
