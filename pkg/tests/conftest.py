from unittest import mock

import pytest

from lebesgue_ud import diagnostics

# every ConditionReport produced during the session, for the inclusion audit
ASSESSED: list = []
ACCEPTANCE_LINES: list[str] = []

_real_assess = diagnostics.assess


def _recording_assess(*args, **kwargs):
    report = _real_assess(*args, **kwargs)
    ASSESSED.append(report)
    return report


@pytest.fixture(scope="session", autouse=True)
def record_assessments():
    with mock.patch.object(diagnostics, "assess", _recording_assess):
        yield


def pytest_collection_modifyitems(session, config, items):
    # the inclusion audit inspects every run made by the rest of the suite
    last = [item for item in items if item.get_closest_marker("audit_last")]
    rest = [item for item in items if not item.get_closest_marker("audit_last")]
    items[:] = rest + last


def pytest_configure(config):
    config.addinivalue_line("markers", "audit_last: run after every other test")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
