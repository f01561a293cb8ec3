"""Air-to-ground channel model for a low-altitude aerial base station.

The model combines free-space loss with environment-dependent excess losses,
weighted by a line-of-sight probability that is a sigmoid in the elevation
angle (in degrees) between a ground user and the platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact by definition

# Boundary decisions at the coverage edge use this slack so that float noise
# cannot flip a user that sits exactly on the limit.
DEFAULT_TOL_DB = 1e-9


@dataclass(frozen=True)
class Environment:
    """RF propagation parameters of a deployment environment.

    Attributes:
        name: human-readable label.
        a: sigmoid offset of the LoS-probability curve (dimensionless).
        b: sigmoid steepness of the LoS-probability curve (per degree).
        eta_los_db: excess loss on top of free space for LoS links (dB).
        eta_nlos_db: excess loss for non-LoS links (dB).
    """

    name: str
    a: float
    b: float
    eta_los_db: float
    eta_nlos_db: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"sigmoid parameters must be positive, got a={self.a}, b={self.b}")
        if not (0 <= self.eta_los_db <= self.eta_nlos_db):
            raise ValueError(
                "excess losses must satisfy 0 <= eta_los_db <= eta_nlos_db, "
                f"got ({self.eta_los_db}, {self.eta_nlos_db})"
            )


@dataclass(frozen=True)
class LinkBudget:
    """QoS pathloss threshold plus the carrier-dependent channel constants.

    ``a_db`` is the (negative) gap between LoS and NLoS excess losses;
    ``b_db`` collects the unit-distance free-space term and the NLoS excess
    loss. Both are derived from an Environment and carrier frequency; use
    :meth:`for_environment` so they can never go stale.
    """

    gamma_db: float
    fc_hz: float
    a_db: float
    b_db: float
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if not self.fc_hz > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.fc_hz}")
        if not math.isfinite(self.gamma_db):
            raise ValueError(f"pathloss threshold must be finite, got {self.gamma_db}")

    @classmethod
    def for_environment(
        cls,
        env: Environment,
        gamma_db: float,
        fc_hz: float,
        speed_of_light: float = SPEED_OF_LIGHT,
    ) -> "LinkBudget":
        a_db = env.eta_los_db - env.eta_nlos_db
        b_db = 20.0 * math.log10(4.0 * math.pi * fc_hz / speed_of_light) + env.eta_nlos_db
        return cls(gamma_db=gamma_db, fc_hz=fc_hz, a_db=a_db, b_db=b_db,
                   speed_of_light=speed_of_light)


@dataclass(frozen=True)
class UserLocation:
    """Ground-user position in meters (user and antenna heights neglected)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"user coordinates must be finite, got ({self.x}, {self.y})")


_PRESETS = (
    Environment("Suburban", a=4.88, b=0.43, eta_los_db=0.1, eta_nlos_db=21.0),
    Environment("Urban", a=9.61, b=0.16, eta_los_db=1.0, eta_nlos_db=20.0),
    Environment("Dense Urban", a=12.08, b=0.11, eta_los_db=1.6, eta_nlos_db=23.0),
    Environment("High-rise Urban", a=27.23, b=0.08, eta_los_db=2.3, eta_nlos_db=34.0),
)

# Canonical machine names, in increasing order of urbanization.
PRESET_SLUGS = ("suburban", "urban", "dense-urban", "highrise-urban")

_SLUG_TO_PRESET = dict(zip(PRESET_SLUGS, _PRESETS))


def environment_presets() -> list[Environment]:
    """Return the four built-in environments (suburban through high-rise)."""
    return list(_PRESETS)


def _normalize_name(name: str) -> str:
    return name.strip().lower().replace("_", "-").replace(" ", "-")


def environment_by_name(name: str) -> Environment:
    """Look up a preset by case-insensitive name ('suburban', 'Dense Urban', ...)."""
    slug = _normalize_name(name)
    # tolerate the hyphen inside "high-rise"
    slug = {"high-rise-urban": "highrise-urban"}.get(slug, slug)
    try:
        return _SLUG_TO_PRESET[slug]
    except KeyError:
        raise KeyError(
            f"unknown environment {name!r}; expected one of {', '.join(PRESET_SLUGS)}"
        ) from None


def environment_slug(env: Environment) -> str:
    """Canonical machine name of an environment (presets keep their fixed slugs)."""
    for slug, preset in _SLUG_TO_PRESET.items():
        if preset == env:
            return slug
    return _normalize_name(env.name)


def los_probability(env: Environment, theta_deg: float) -> float:
    """Probability of a line-of-sight link at elevation angle ``theta_deg``.

    Sigmoid in the elevation angle measured in degrees; monotone
    nondecreasing, with values strictly inside (0, 1).

    Raises:
        ValueError: if the angle lies outside [0, 90] degrees.
    """
    if not 0.0 <= theta_deg <= 90.0:
        raise ValueError(f"elevation angle must be within [0, 90] degrees, got {theta_deg}")
    return 1.0 / (1.0 + env.a * math.exp(-env.b * (theta_deg - env.a)))


def pathloss_db(env: Environment, budget: LinkBudget, h: float, r: float) -> float:
    """Mean pathloss in dB between the platform at altitude ``h`` and a user
    at horizontal distance ``r``.

    Distance term plus the LoS-probability-weighted excess losses:
    ``20*log10(sqrt(h^2 + r^2)) + a_db * P(theta) + b_db`` with the elevation
    angle ``theta = atan(h / r)`` in degrees (90 degrees when r = 0).

    Raises:
        ValueError: for negative inputs or the degenerate zero-distance link.
    """
    if h < 0 or r < 0:
        raise ValueError(f"altitude and horizontal distance must be nonnegative, got ({h}, {r})")
    if h == 0 and r == 0:
        raise ValueError("pathloss is undefined at zero distance (h = r = 0)")
    theta_deg = math.degrees(math.atan2(h, r))
    p = los_probability(env, theta_deg)
    distance = math.hypot(h, r)
    return 20.0 * math.log10(distance) + budget.a_db * p + budget.b_db


def is_covered(
    env: Environment,
    budget: LinkBudget,
    h: float,
    r: float,
    tol_db: float = DEFAULT_TOL_DB,
) -> bool:
    """True iff the link meets the QoS pathloss threshold (with edge slack)."""
    return pathloss_db(env, budget, h, r) <= budget.gamma_db + tol_db
