import pytest

_outcomes: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    n, title = marker
    _, results = _outcomes.setdefault(n, (title, []))
    if report.when == "call" or report.outcome != "passed":
        results.append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        title, results = _outcomes[n]
        verdict = "PASS" if results and all(r == "passed" for r in results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict}  {title}")
