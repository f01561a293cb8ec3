"""Experiment harness: random user drops, Monte Carlo replication, statistics.

Randomness is fully pinned down: user positions come from a PCG64 generator
(numpy's documented default BitGenerator) seeded through ``SeedSequence``,
and each Monte Carlo run derives its own child seed from the master seed and
the run index, so a given (scenario, seed) pair reproduces results
bit-for-bit and every (environment, threshold) cell sees the same user drops
run by run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .alpha import DEFAULT_CONFIG, SolverConfig
from .channel import Environment, LinkBudget, UserLocation
from .coverage import AltitudeBounds, InfeasiblePlacementError, PositionBox, place_drone

# Default experiment parameters (position box in meters, thresholds in dB).
DEFAULT_BOX = PositionBox(x_l=-1450.0, x_u=1450.0, y_l=-1258.0, y_u=1258.0)
DEFAULT_FC_HZ = 2.5e9
DEFAULT_GAMMAS_DB = (90.0, 100.0, 125.0)
DEFAULT_RUNS = 100
DEFAULT_USER_COUNT = 40


@dataclass(frozen=True)
class Scenario:
    """One placement problem instance (or a template for Monte Carlo runs,
    in which case ``users`` may be left empty and is regenerated per run)."""

    users: tuple[UserLocation, ...]
    box: PositionBox
    environment: Environment
    gamma_db: float
    fc_hz: float = DEFAULT_FC_HZ
    altitude_bounds: AltitudeBounds = AltitudeBounds()
    config: SolverConfig = DEFAULT_CONFIG

    def budget(self) -> LinkBudget:
        return LinkBudget.for_environment(self.environment, self.gamma_db, self.fc_hz)


@dataclass(frozen=True)
class MonteCarloStats:
    """Served-user statistics over repeated runs, with a 95% normal interval."""

    runs: int
    per_run_counts: tuple[int, ...]
    mean: float
    ci_low: float
    ci_high: float
    ci_half_width: float

    def __post_init__(self) -> None:
        if self.runs != len(self.per_run_counts):
            raise ValueError("runs must match the number of recorded counts")


def child_seed(seed: int, run_index: int) -> int:
    """Derive the 64-bit seed of one Monte Carlo run from the master seed.

    Uses ``numpy.random.SeedSequence((seed mod 2^64, run_index))`` and takes
    one 64-bit word of its output, so child streams are decorrelated and the
    mapping is stable across platforms.
    """
    ss = np.random.SeedSequence((seed % 2**64, run_index))
    return int(ss.generate_state(1, np.uint64)[0])


def generate_users(n: int, box: PositionBox, seed: int) -> list[UserLocation]:
    """Drop ``n`` users i.i.d. uniformly over the box.

    Draws an (n, 2) block of unit uniforms from PCG64 in row-major order and
    maps it affinely onto the box, so equal seeds give identical users.

    Raises:
        ValueError: if ``n < 1``.
    """
    if n < 1:
        raise ValueError(f"user count must be >= 1, got {n}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed % 2**64)))
    u = rng.random((n, 2))
    xs = box.x_l + u[:, 0] * (box.x_u - box.x_l)
    ys = box.y_l + u[:, 1] * (box.y_u - box.y_l)
    return [UserLocation(float(x), float(y)) for x, y in zip(xs, ys)]


def confidence_interval(samples, level: float = 0.95) -> tuple[float, float]:
    """Normal-approximation interval ``mean +- z * s / sqrt(n)``.

    Uses the sample standard deviation; a single sample degenerates to a
    zero-width interval at the mean.

    Raises:
        ValueError: for an empty sample list or a level outside (0, 1).
    """
    values = [float(s) for s in samples]
    if not values:
        raise ValueError("at least one sample is required")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must be inside (0, 1), got {level}")
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return (mean, mean)
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    z = NormalDist().inv_cdf((1.0 + level) / 2.0)
    half = z * math.sqrt(var) / math.sqrt(n)
    return (mean - half, mean + half)


def run_monte_carlo(base: Scenario, n_users: int, runs: int, seed: int) -> MonteCarloStats:
    """Repeat the placement ``runs`` times on fresh uniform user drops.

    Run ``r`` regenerates ``n_users`` users with ``child_seed(seed, r)`` --
    independent of the scenario's environment and threshold, so sweeps over
    those parameters face identical user drops -- then solves the placement
    and records the served count.

    Raises:
        ValueError: for ``runs < 1``.
        InfeasiblePlacementError: from any run, annotated with its index.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    budget = base.budget()
    counts: list[int] = []
    for r in range(runs):
        users = generate_users(n_users, base.box, child_seed(seed, r))
        try:
            placement = place_drone(users, base.environment, budget, base.box,
                                    base.altitude_bounds, base.config)
        except InfeasiblePlacementError as exc:
            raise InfeasiblePlacementError(f"run {r}: {exc}") from exc
        counts.append(placement.served_count)
    ordered = tuple(counts)  # run order; aggregation below is order-independent
    low, high = confidence_interval(ordered)
    mean = math.fsum(ordered) / runs
    return MonteCarloStats(
        runs=runs, per_run_counts=ordered, mean=mean,
        ci_low=low, ci_high=high, ci_half_width=(high - low) / 2.0,
    )
