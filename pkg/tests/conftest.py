import pytest

from schwinger.densities import DensityFamily, PhysicalConstants
from schwinger.fock import ModeWindow, enumerate_basis

_ACCEPTANCE = []


def record_acceptance(number, title, passed, detail):
    _ACCEPTANCE.append((number, title, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}: {detail}")


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def small_catalog():
    return enumerate_basis(ModeWindow(2, 2))


@pytest.fixture(scope="session")
def small_family(small_catalog):
    return DensityFamily(small_catalog)


@pytest.fixture(scope="session")
def mid_catalog():
    return enumerate_basis(ModeWindow(3, 3))


@pytest.fixture(scope="session")
def mid_family(mid_catalog):
    return DensityFamily(mid_catalog)


@pytest.fixture(scope="session")
def big_catalog():
    return enumerate_basis(ModeWindow(4, 3))


@pytest.fixture(scope="session")
def big_family(big_catalog):
    return DensityFamily(big_catalog)
