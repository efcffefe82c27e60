"""Shared fixtures: the expensive benchmark runs are done once per session.

The noisy-family matrix (10 instances x 3 cost functions x 3 split seeds)
backs several acceptance checks, so it is collected a single time and
shared.  Everything in it is deterministic except wall-clock timings.
"""

from __future__ import annotations

import pytest

from snapilp.costs import CostFunction
from snapilp.harness import RunConfig, bench
from snapilp.tasks import bundled_task, noisy_suite

ALL_COST_FNS = (
    CostFunction.MDL,
    CostFunction.ERROR_SIZE,
    CostFunction.LEX_FN_SIZE,
)
TRIAL_SEEDS = (1, 2, 3)
SEARCH_TIMEOUT = 10.0


@pytest.fixture(scope="session")
def noisy_matrix():
    """All (noisy instance, cost function, seed) benchmark rows."""
    return bench(
        noisy_suite(),
        ALL_COST_FNS,
        TRIAL_SEEDS,
        config=RunConfig(timeout=SEARCH_TIMEOUT),
    )


@pytest.fixture(scope="session")
def suite_rows(noisy_matrix):
    """One benchmark row per bundled task (MDL, seed 1, shared timeout).

    The noisy rows are reused from the matrix; grandparent and path are
    run here.
    """
    fresh = bench(
        [bundled_task("grandparent"), bundled_task("path")],
        [CostFunction.MDL],
        [1],
        config=RunConfig(timeout=SEARCH_TIMEOUT),
    )
    reused = [
        r for r in noisy_matrix
        if r.cost_fn is CostFunction.MDL and r.seed == 1
    ]
    return fresh + reused


@pytest.fixture(scope="session")
def grandparent():
    return bundled_task("grandparent")


@pytest.fixture(scope="session")
def path():
    return bundled_task("path")
