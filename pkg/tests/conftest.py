"""Collects acceptance-criterion verdicts and prints them after the run."""

import pytest

_VERDICTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    crit = dict(item.user_properties).get("criterion")
    if crit is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        detail = dict(item.user_properties).get("detail", "")
        _VERDICTS[crit] = ("PASS" if rep.passed else "FAIL", dict(item.user_properties).get("title", ""), detail)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_VERDICTS):
        verdict, title, detail = _VERDICTS[crit]
        terminalreporter.write_line(f"criterion {crit:>2}: {verdict}  {title}  [{detail}]")
