import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    number, limit = mark.args
    _RESULTS[number] = (item.name, rep.passed, call.duration, limit)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        name, passed, secs, limit = _RESULTS[number]
        status = "PASS" if passed else "FAIL"
        tr.write_line(f"criterion {number:>2}: {status}  {secs:6.2f}s (budget {limit}s)  {name}")
