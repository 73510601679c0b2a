import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from occtrack.kernels import assignment, boxes, zbuffer  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture(params=["numba", "numpy"])
def kernel_backend(request, monkeypatch):
    """Run a test once with the jitted kernels and once with the numpy fallback."""
    flag = request.param == "numba"
    for mod in (assignment, boxes, zbuffer):
        monkeypatch.setattr(mod, "USE_NUMBA", flag)
    return request.param


@pytest.fixture
def data_dir():
    return DATA


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_acceptance):
        outcome, duration = _acceptance[name]
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"{status}  {name}  ({duration:.1f} s)")
