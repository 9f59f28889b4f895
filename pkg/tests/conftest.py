import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, label = marker.args
        props = dict(item.user_properties)
        _CRITERIA.setdefault(number, []).append((label, report.passed, props))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        ok = all(p for _, p, _ in parts)
        details = []
        for label, passed, props in parts:
            bits = [label]
            if "max_residual" in props:
                bits.append(f"max residual {props['max_residual']:.2e}")
            if "seconds" in props:
                bits.append(f"{props['seconds']:.1f} s")
            if len(parts) > 1:
                bits.append("pass" if passed else "FAIL")
            details.append(", ".join(bits))
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  " + "; ".join(details))
