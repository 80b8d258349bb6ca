import pytest

_outcomes = {}  # criterion number -> (description, [passed, ...])
_notes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, text = mark.args
    entry = _outcomes.setdefault(number, (text, []))
    if report.when == "call" or (report.when == "setup" and not report.passed):
        entry[1].append(report.passed)


@pytest.fixture
def note(request):
    """Attach a line of measured data to the test's criterion in the summary."""
    number = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _notes.setdefault(number, []).append(text)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        text, results = _outcomes[number]
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}: {text}")
        for line in _notes.get(number, []):
            terminalreporter.write_line(f"    {line}")
