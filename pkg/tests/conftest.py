import pytest

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    n = marker.args[0]
    note = "; ".join(str(v) for k, v in item.user_properties if k == "note")
    _ACCEPTANCE[n] = ("PASS" if rep.passed else "FAIL", note)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, note = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}" + (f"  ({note})" if note else ""))
