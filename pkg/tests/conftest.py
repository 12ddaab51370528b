import os

from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

import pytest

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or (rep.when == "setup" and rep.failed)):
        return
    cid, text = mark.args
    entry = _CRITERIA.setdefault(cid, {"text": text, "ok": True, "notes": []})
    entry["ok"] = entry["ok"] and rep.passed
    sub = item.name.split("_", 2)[-1]
    measured = dict(item.user_properties).get("measured", "")
    entry["notes"].append(f"{sub}={'ok' if rep.passed else 'FAIL'}"
                          + (f" ({measured})" if measured else ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_CRITERIA):
        e = _CRITERIA[cid]
        tr.write_line(f"CRITERION {cid:2d} {'PASS' if e['ok'] else 'FAIL'}  {e['text']}")
        for note in e["notes"]:
            tr.write_line(f"    {note}")
    passed = sum(e["ok"] for e in _CRITERIA.values())
    tr.write_line(f"{passed}/{len(_CRITERIA)} criteria pass")
