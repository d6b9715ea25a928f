import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shintani.enumeration import enumerate_table
from shintani.spectral_zeta import build_coefficients, geometric_grid, partial_sums

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

WEYL_GAMMA = 1.0
WEYL_X = 10 ** 6


@pytest.fixture(scope="session")
def weyl_data():
    """Weyl sums at gamma = 1 on the 50-point geometric grid over [1e3, 1e6].

    Keys (sign, irreducible_only); values (X, S, cumulative sum of |c| on X).
    """
    grid = geometric_grid(1e3, WEYL_X, 50)
    out = {}
    for sign in (-1, 1):
        table = enumerate_table(sign, WEYL_X)
        for irr in (False, True):
            series = build_coefficients(WEYL_GAMMA, sign, WEYL_X, irr, table=table)
            w = partial_sums(series, grid)
            out[sign, irr] = (w.X.astype(float), w.S, np.cumsum(np.abs(series.c))[grid])
    return out


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
