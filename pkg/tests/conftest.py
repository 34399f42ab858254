"""Shared fixtures and the acceptance-criteria summary reporter.

Tests named test_criterion_* get one PASS/FAIL line each in the terminal
summary so the acceptance status is readable at a glance.
"""

import pytest

from zetalab import lab, torus, variance

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.when == "call":
            _ACCEPTANCE[name] = report.outcome
        elif report.when == "setup" and report.outcome != "passed":
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{name}: {outcome}")


@pytest.fixture(scope="session")
def gauss_20k():
    return lab.synthetic_gaussian_set(20_000, seed=0)


@pytest.fixture(scope="session")
def gauss_100k():
    return lab.synthetic_gaussian_set(100_000, seed=0)


@pytest.fixture(scope="session")
def model_075_300():
    return torus.make_torus_model(0.75, 300.0)


@pytest.fixture(scope="session")
def ctx_desk():
    """The (psi=15, T=1e5) study context used across the line experiments."""
    return variance.make_context(psi=15.0, T=1.0e5)


@pytest.fixture(scope="session")
def line_desk(ctx_desk):
    """Line samples for the desk experiment: 2e4 grid points on [50, T]."""
    return lab.sample_line(ctx_desk, sampling={"mode": "grid", "count": 20_000})
