import pytest

from emscale.cycle import resample, wltc_class3
from emscale.sim import SimContext

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, text = marker.args
        details = [v for k, v in report.user_properties if k == "detail"]
        entry = _criteria.setdefault(number, {"text": text, "passed": 0, "failed": [], "details": []})
        if report.outcome == "passed":
            entry["passed"] += 1
        else:
            entry["failed"].append(item.name)
        entry["details"] += details


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        n = e["passed"] + len(e["failed"])
        status = "FAIL" if e["failed"] else "PASS"
        line = f"[{status}] criterion {number}: {e['text']} ({e['passed']}/{n} checks)"
        if e["failed"]:
            line += " failed: " + ", ".join(e["failed"])
        terminalreporter.write_line(line)
        for d in e["details"]:
            terminalreporter.write_line(f"    {d}")


@pytest.fixture(scope="session")
def wltc():
    return resample(wltc_class3(), 1.0)


@pytest.fixture(scope="session")
def wltc_ctx(wltc):
    return SimContext(wltc)
