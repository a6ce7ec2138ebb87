import pytest

from nicmemsim.model import Direction
from nicmemsim.scenarios import builtin_scenarios, standard_sizes
from nicmemsim.sim import run_sweep

CRITERIA = {
    1: "BRAM 1 MiB bandwidth and strictly increasing sweep",
    2: "DDR simple design peaks",
    3: "MicroBlaze design peaks and contention toggle",
    4: "PetaLinux design peaks and rooflines",
    5: "bandwidth ceilings over the standard grid",
    6: "DES and analytic agree within 2% at >= 4 KiB",
    7: "RDMA properties and generation presets",
    8: "equal seeds give byte-identical CSV",
    9: "packetize matches a brute-force oracle",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test establishes")


def pytest_runtest_logreport(report):
    n = getattr(report, "criterion", None)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(n, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status:7s} {title}")


def _grid(model):
    rows = []
    for cfg in builtin_scenarios():
        rows.extend(run_sweep(cfg, list(Direction), range(1, cfg.max_channels + 1), standard_sizes(cfg), model=model))
    return rows


@pytest.fixture(scope="session")
def analytic_grid():
    return _grid("analytic")


@pytest.fixture(scope="session")
def des_grid():
    return _grid("des")
