import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from fneighbors import generate  # noqa: E402
from fneighbors.generators import gen_circle, gen_ellipse, gen_figure_eight, gen_square  # noqa: E402


@pytest.fixture(scope="session")
def circle():
    return gen_circle(1024, 1)


@pytest.fixture(scope="session")
def circle256():
    return gen_circle(256, 1)


@pytest.fixture(scope="session")
def triple():
    return gen_circle(1536, 3)


@pytest.fixture(scope="session")
def example1():
    return generate("example1")


@pytest.fixture(scope="session")
def torusknot():
    return generate("torusknot")


@pytest.fixture(scope="session")
def figure8():
    return gen_figure_eight(1024)


@pytest.fixture(scope="session")
def ellipse():
    return gen_ellipse(1024)


@pytest.fixture(scope="session")
def square():
    return gen_square(1024)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for k, m in __import__("sys").modules.items() if k.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
