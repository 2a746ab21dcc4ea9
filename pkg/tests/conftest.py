import sys

import pytest
from hypothesis import HealthCheck, settings

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            number, title = mark.args
            _criteria.setdefault(number, {"title": title, "nodes": set(), "failed": False,
                                          "ran": 0})
            _criteria[number]["nodes"].add(item.nodeid)


def pytest_deselected(items):
    for item in items:
        for number, entry in list(_criteria.items()):
            entry["nodes"].discard(item.nodeid)
            if not entry["nodes"]:
                del _criteria[number]


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid in entry["nodes"]:
            if report.failed:
                entry["failed"] = True
            if report.when == "call":
                entry["ran"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        if entry["ran"] == 0 and not entry["failed"]:
            status = "NOT RUN"
        else:
            status = "FAIL" if entry["failed"] else "PASS"
        terminalreporter.write_line(f"{status} criterion {number:2d}: {entry['title']}")
