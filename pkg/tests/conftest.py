"""Prints one PASS/FAIL line per acceptance criterion after the run."""
import pytest

_results = {}


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        key = report.nodeid.split(marker, 1)[1]
        _results[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results, key=lambda k: int(k.split("_", 1)[0])):
        number, name = key.split("_", 1)
        status = "PASS" if _results[key] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {name.replace('_', ' ')}")


@pytest.fixture
def stopwatch():
    import time

    class Watch:
        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.start
            return False

    return Watch
