import numpy as np
import pytest

from schrodinger_sat import Representation, WaveFunction, make_grid


def pytest_addoption(parser):
    parser.addoption("--fullscale", action="store_true", default=False,
                     help="also run the full-resolution experiments (tens of minutes)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--fullscale"):
        return
    skip = pytest.mark.skip(reason="full-resolution run; enable with --fullscale")
    for item in items:
        if "fullscale" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n, rep=Representation.INTERFACE, length=2.0):
    grid = make_grid(length, n)
    size = grid.size(rep)
    return WaveFunction(rng.normal(size=size) + 1j * rng.normal(size=size), grid, rep)


# one line per acceptance check, printed after the run
ACCEPTANCE_LINES: list[str] = []


def report(check, ok, detail):
    line = f"{check}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
