import numpy as np
import pytest

from helmbem.bench import gen_box, gen_sphere_cube


@pytest.fixture(scope="session")
def sphere_972():
    return gen_sphere_cube(9)


@pytest.fixture(scope="session")
def sphere_small():
    return gen_sphere_cube(4)


@pytest.fixture(scope="session")
def box_small():
    return gen_box((1.0, 0.6, 0.4), (5, 3, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
CRITERIA = {}


@pytest.fixture
def report():
    def add(tag, ok, detail):
        prev = CRITERIA.get(tag)
        if prev is not None:
            ok = ok and prev[0]
            detail = f"{prev[1]}; {detail}"
        CRITERIA[tag] = (bool(ok), detail)
    return add


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(CRITERIA, key=lambda t: (len(t), t)):
        ok, detail = CRITERIA[tag]
        terminalreporter.write_line(f"criterion {tag}: {'PASS' if ok else 'FAIL'}  {detail}")
