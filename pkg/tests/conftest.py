import pytest
from hypothesis import settings

from aperiodic_lab.generators import (gen_block_substitution_2d, gen_fibonacci_integer, gen_lattice,
                                      gen_periodic_superlattice)

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def z1():
    return gen_lattice(1, 1, 50)


@pytest.fixture(scope="session")
def z2():
    return gen_lattice(2, 1, 32)


@pytest.fixture(scope="session")
def fib200():
    return gen_fibonacci_integer(200)


@pytest.fixture(scope="session")
def fib500():
    return gen_fibonacci_integer(500)


@pytest.fixture(scope="session")
def fib1000():
    return gen_fibonacci_integer(1000)


@pytest.fixture(scope="session")
def block64():
    return gen_block_substitution_2d("A", 64)


@pytest.fixture(scope="session")
def superlattice():
    return gen_periodic_superlattice([0, "1/3"], 1, 50)


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({msg})")
