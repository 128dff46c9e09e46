import pytest

_CRITERIA = {}
_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _CRITERIA[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    key = _CRITERIA.get(report.nodeid)
    if key is None:
        return
    failed = report.failed
    skipped = report.skipped and report.when == "setup"
    prev = _OUTCOMES.get(key, "PASS")
    if failed:
        _OUTCOMES[key] = "FAIL"
    elif skipped and prev != "FAIL":
        _OUTCOMES[key] = "SKIP"
    else:
        _OUTCOMES.setdefault(key, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), outcome in sorted(_OUTCOMES.items()):
        terminalreporter.write_line(f"criterion {num:>2}: {outcome}  {title}")
