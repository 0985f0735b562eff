"""Shared fixtures: the desk-scale grid and a cached set of ground states.

The desk solves are expensive (a few seconds each), so they are computed
once per session and shared between the structural tests and the
acceptance suite.
"""

from __future__ import annotations

import numpy as np
import pytest

from nlstrap.grid import make_grid
from nlstrap.energy import Exponent
from nlstrap.groundstate import SolveConfig, solve
from nlstrap.oscillator import build_basis

DESK_R_LIST = (0.05, 0.1, 0.2, 0.4)
DESK_P = 3.0
DESK_CHI = 4.0


@pytest.fixture(scope="session")
def desk_grid():
    return make_grid(32, 32, 64, 16.0, 16.0, 32.0)


@pytest.fixture(scope="session")
def desk_basis(desk_grid):
    return build_basis(desk_grid)


@pytest.fixture(scope="session")
def desk_solves(desk_grid):
    results = {}
    for r in DESK_R_LIST:
        res = solve(desk_grid, SolveConfig(p=Exponent(DESK_P), r=r, chi=DESK_CHI))
        assert res.status == "interior", f"desk solve r={r} ended {res.status}"
        results[r] = res
    return results


@pytest.fixture(scope="session")
def desk_phase_solve(desk_grid):
    return solve(desk_grid, SolveConfig(p=Exponent(DESK_P), r=0.1, chi=DESK_CHI,
                                        init="gaussian-complex-phase"))


@pytest.fixture(scope="session")
def small_grid():
    """Coarse grid for solver-mechanics tests (fast, still physical)."""
    return make_grid(16, 16, 32, 12.0, 12.0, 24.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
