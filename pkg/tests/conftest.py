import pytest

from friable import acceptance, kernel_saddle, sieves, special_functions

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def rho40():
    return special_functions.build_rho_table(40.0)


@pytest.fixture(scope="session")
def rho101():
    return special_functions.build_rho_table(101.0)


@pytest.fixture(scope="session")
def tables_small():
    return sieves.build_tables(10**4)


@pytest.fixture(scope="session")
def tables_1e6():
    return sieves.build_tables(10**6)


@pytest.fixture(scope="session")
def tables_1e7():
    return sieves.build_tables(10**7)


@pytest.fixture(scope="session")
def ctx():
    return kernel_saddle.make_context()


@pytest.fixture(scope="session")
def workspace():
    # fresh, so each criterion's runtime includes the tables it builds
    return acceptance.Workspace(acceptance.Scale.full())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
