from __future__ import annotations

import re
from collections import defaultdict

import pytest

_results: dict[str, list[bool]] = defaultdict(list)
_details: dict[str, list[str]] = defaultdict(list)


@pytest.fixture
def report_line(request):
    """Collects detail strings for the acceptance summary."""
    key = _criterion(request.node.name)
    return lambda text: _details[key].append(text) if key else None


def _criterion(name: str) -> str | None:
    match = re.match(r"test_criterion_(\d+)_", name)
    return f"criterion {match.group(1)}" if match else None


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    key = _criterion(item.name)
    if key and (rep.when == "call" or rep.failed):
        _results[key].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results, key=lambda k: int(k.split()[1])):
        ok = all(_results[key])
        detail = "; ".join(_details[key][-3:])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
