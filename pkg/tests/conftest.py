import os

import pytest

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        if rep.skipped and not detail:
            detail = str(rep.longrepr[-1]) if isinstance(rep.longrepr, tuple) else ""
        _CRITERIA.append((marker.args[0], marker.args[1], rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_CRITERIA):
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        line = f"{word}  {number}. {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


full_scale = pytest.mark.skipif(
    os.environ.get("SEGFACTOR_FULL") != "1",
    reason="full-scale run; set SEGFACTOR_FULL=1",
)
