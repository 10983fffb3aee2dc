import numpy as np
import pytest


def random_density_matrix(rng, dim, support=None, rank=None):
    """Random state living on the lowest ``support`` Fock levels of ``dim``."""
    support = support or dim
    rank = rank or support
    g = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    small = g @ g.conj().T
    small /= np.trace(small).real
    rho = np.zeros((dim, dim), dtype=complex)
    rho[:support, :support] = small
    return rho


def random_pure_vector(rng, dim, support=None):
    support = support or dim
    v = np.zeros(dim, dtype=complex)
    v[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# One PASS/FAIL line per acceptance criterion in the terminal summary.
_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
