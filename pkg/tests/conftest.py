import pytest
from hypothesis import settings

from drn.dsl import load_bundled

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def thcell():
    return load_bundled("thcell")


@pytest.fixture(scope="session")
def input3():
    return load_bundled("input3")


@pytest.fixture(scope="session")
def toy():
    return load_bundled("toy_fig1_like")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
