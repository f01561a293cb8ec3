"""dronecell: 3-D placement of an aerial base station over ground users.

Given user positions, an RF propagation environment and a pathloss budget,
the library finds the horizontal position, coverage radius and altitude of
a single aerial base station that serve the most users, and ships a Monte
Carlo harness plus a CLI for batch experiments.
"""

__version__ = "0.1.0"

from .alpha import (ALPHA_MAX, AlphaSolution, DerivativeTerms, GammaCurve,
                    SolverConfig, derivative_terms, find_alpha_star, gamma_curve,
                    gamma_derivative, gamma_derivatives, gamma_value, gamma_values,
                    grid_oracle_alpha_star)
from .channel import (SPEED_OF_LIGHT, Environment, LinkBudget, UserLocation,
                      environment_by_name, environment_presets, environment_slug,
                      is_covered, los_probability, pathloss_db)
from .coverage import (AltitudeBounds, InfeasiblePlacementError, Placement,
                       PositionBox, brute_force_placement, max_coverage_disk,
                       minimum_enclosing_circle, place_drone, shrink_radius,
                       verify_placement)
from .scenario import (DEFAULT_BOX, DEFAULT_FC_HZ, DEFAULT_GAMMAS_DB,
                       MonteCarloStats, Scenario, child_seed, confidence_interval,
                       generate_users, run_monte_carlo)

__all__ = [
    "__version__",
    "ALPHA_MAX", "SPEED_OF_LIGHT",
    "Environment", "LinkBudget", "UserLocation",
    "environment_presets", "environment_by_name", "environment_slug",
    "los_probability", "pathloss_db", "is_covered",
    "SolverConfig", "DerivativeTerms", "AlphaSolution", "GammaCurve",
    "gamma_value", "gamma_values", "gamma_derivative", "gamma_derivatives",
    "derivative_terms", "find_alpha_star", "grid_oracle_alpha_star", "gamma_curve",
    "PositionBox", "AltitudeBounds", "Placement", "InfeasiblePlacementError",
    "max_coverage_disk", "brute_force_placement", "shrink_radius",
    "minimum_enclosing_circle", "place_drone", "verify_placement",
    "Scenario", "MonteCarloStats", "DEFAULT_BOX", "DEFAULT_FC_HZ",
    "DEFAULT_GAMMAS_DB", "child_seed", "generate_users", "confidence_interval",
    "run_monte_carlo",
]
