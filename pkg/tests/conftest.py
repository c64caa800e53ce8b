"""Acceptance criteria are tagged with ``@pytest.mark.criterion("N")``; one line per criterion is printed at the end."""

_outcomes: dict[str, list[str]] = {}
_labels: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, label): acceptance criterion checked by this test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            cid = mark.args[0]
            _labels.setdefault(cid, mark.args[1] if len(mark.args) > 1 else "")
            item.user_properties.append(("criterion", cid))


def pytest_runtest_logreport(report):
    cid = dict(report.user_properties).get("criterion")
    if cid is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(cid, []).append(report.outcome)


def _key(cid: str):
    digits = "".join(ch for ch in cid if ch.isdigit())
    return int(digits or 0), cid


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_outcomes, key=_key):
        ok = all(o == "passed" for o in _outcomes[cid])
        terminalreporter.write_line(f"criterion {cid:>3}: {'PASS' if ok else 'FAIL'}  {_labels.get(cid, '')}")
