import numpy as np
import pytest

ACCEPTANCE_RESULTS = {}


def random_density(rng, dim=2, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_nu(rng):
    r = np.sqrt(rng.uniform())
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi))


def random_axis(rng):
    v = rng.normal(size=3)
    return tuple(v / np.linalg.norm(v))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    """Record one acceptance criterion as (label, passed, detail)."""
    def _record(key, label, passed, detail=""):
        ACCEPTANCE_RESULTS[key] = (label, bool(passed), detail)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[2:])):
        label, passed, detail = ACCEPTANCE_RESULTS[key]
        status = "PASS" if passed else "FAIL"
        line = f"{key} {status}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
