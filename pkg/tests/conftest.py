"""Shared fixtures: profiles, eigenpairs and full pipelines are built once per session."""

import pytest

from oscoeff.nonlinear import run_pipeline
from oscoeff.profiles import make_blasius, make_exponential

NU = 1e-30


@pytest.fixture(scope="session")
def exp_profile():
    return make_exponential(1.0)


@pytest.fixture(scope="session")
def blasius():
    return make_blasius()


@pytest.fixture(scope="session")
def exp_pipeline(exp_profile):
    return run_pipeline(exp_profile, NU, 1.5)


@pytest.fixture(scope="session")
def blasius_pipeline(blasius):
    return run_pipeline(blasius, NU, 0.5)


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
