import functools

import pytest

from proxdescent import SolverConfig, default_corpus, run_nsdm

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            num, title = m.args
            _criteria.setdefault(num, {"title": title, "outcomes": []})


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for num, entry in _criteria.items():
        if f"::test_c{num:02d}_" in report.nodeid:
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        if not e["outcomes"]:
            verdict = "NOT RUN"
        elif all(o == "passed" for o in e["outcomes"]):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        tr.write_line(f"criterion {num:2d}  {verdict:<7}  {e['title']}  ({len(e['outcomes'])} checks)")


@functools.lru_cache(maxsize=None)
def corpus_traces():
    """NSDM traces of the default corpus from the default starts, shared across tests."""
    return {s.id: (s, run_nsdm(s.oracle, s.x0, SolverConfig())) for s in default_corpus()}


@pytest.fixture(scope="session")
def corpus_runs():
    return corpus_traces()
