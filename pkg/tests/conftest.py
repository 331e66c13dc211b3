"""Shared fixtures for the qfactl tests."""

import pytest

from qfactl.optimizer import solve_problem2


@pytest.fixture(scope="session")
def two_cycles_run():
    """The default Problem-2 search, run once per session."""
    return solve_problem2(dim=6, restarts=200, seed=7)
