"""Shared pytest wiring.

Tests in ``test_acceptance.py`` carry an ``acceptance`` marker with a short
label.  The hooks below collect their outcomes and print one PASS/FAIL line
per labelled check at the end of the run, so the release gate is readable
at a glance even inside a long test log.
"""

import pytest
from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=50,
                          derandomize=True)
settings.load_profile("suite")

_GATE: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(label): release-gate check reported as a PASS/FAIL line")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call":
        _GATE[label] = _GATE.get(label, True) and report.passed
    elif report.failed or report.skipped:
        # Setup or teardown trouble must not surface as a silent pass.
        _GATE[label] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _GATE:
        return
    terminalreporter.section("acceptance gate")
    for label, ok in _GATE.items():
        terminalreporter.write_line(("PASS  " if ok else "FAIL  ") + label)
