import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from voacoinv.voa.instance import (build_fock, build_heisenberg, build_simple,  # noqa: E402
                                   build_virasoro, voa_as_module)

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def rationals(max_num=12, max_den=6):
    """Small exact rationals for property tests."""
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


@pytest.fixture(scope="session")
def heis6():
    return build_heisenberg(6)


@pytest.fixture(scope="session")
def vir_half6():
    return build_virasoro(Fraction(1, 2), 6)


@pytest.fixture(scope="session")
def fock6(heis6):
    cache = {}

    def get(lam):
        lam = Fraction(lam)
        if lam not in cache:
            cache[lam] = build_fock(lam, 6, heis6)
        return cache[lam]
    return get


@pytest.fixture(scope="session")
def ising6(vir_half6):
    """Simple c = 1/2 modules by conformal dimension, plus the vacuum module."""
    mods = {h: build_simple(Fraction(1, 2), Fraction(h), 6, vir_half6) for h in ("0", "1/2", "1/16")}
    mods["vac"] = voa_as_module(vir_half6, 6)
    return mods


# -- acceptance report ---------------------------------------------------------------

ACCEPTANCE_LINES = {}


class _Criterion:
    """Context manager recording one PASS/FAIL line for an acceptance criterion."""

    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = self.detail if exc_type is None else f"{self.detail} [{exc_type.__name__}: {exc}]".strip()
        line = f"criterion {self.number} {status}: {self.title} -- {detail}"
        ACCEPTANCE_LINES[self.number] = line
        print(line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
