"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion
at the end of the run."""

import pytest

_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    num, title = mark.args
    if rep.failed:
        msg = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else "failed"
        _RESULTS[num] = ("FAIL", title, msg.splitlines()[0][:120])
    elif rep.when == "call" and num not in _RESULTS:
        detail = getattr(item, "acceptance_detail", "")
        _RESULTS[num] = ("PASS", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        status, title, detail = _RESULTS[num]
        line = f"[{status}] {num}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
