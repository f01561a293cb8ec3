"""Scenario-file loading and machine-readable output writers.

Scenario files are JSON with a strict schema (unknown fields are rejected);
results are JSON documents, curves and statistics tables are CSV. All
writers format floats with ``repr`` and force ``\\n`` newlines so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import jsonschema

from . import __version__
from .alpha import GammaCurve, SolverConfig
from .channel import Environment, environment_by_name, environment_slug
from .coverage import AltitudeBounds, Placement, PositionBox
from .scenario import DEFAULT_FC_HZ, Scenario, UserLocation, generate_users


class ScenarioFormatError(ValueError):
    """A scenario file failed parsing or schema validation."""


_NUMBER = {"type": "number"}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["environment", "gamma_db"],
    "properties": {
        "users": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUMBER},
        },
        "generate": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "seed"],
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
        },
        "box": {
            "type": "object",
            "additionalProperties": False,
            "required": ["x_l", "x_u", "y_l", "y_u"],
            "properties": {"x_l": _NUMBER, "x_u": _NUMBER, "y_l": _NUMBER, "y_u": _NUMBER},
        },
        "altitude": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "h_l": {"type": "number", "minimum": 0},
                "h_u": {"type": ["number", "null"]},
            },
        },
        "environment": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["name", "a", "b", "eta_los_db", "eta_nlos_db"],
                    "properties": {
                        "name": {"type": "string"},
                        "a": {"type": "number", "exclusiveMinimum": 0},
                        "b": {"type": "number", "exclusiveMinimum": 0},
                        "eta_los_db": {"type": "number", "minimum": 0},
                        "eta_nlos_db": {"type": "number", "minimum": 0},
                    },
                },
            ]
        },
        "gamma_db": _NUMBER,
        "fc_hz": {"type": "number", "exclusiveMinimum": 0},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epsilon": {"type": "number", "exclusiveMinimum": 0},
                "max_iterations": {"type": "integer", "minimum": 1},
                "grid_points": {"type": "integer", "minimum": 1000},
                "tol_db": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
    "oneOf": [
        {"required": ["users"], "not": {"required": ["generate"]}},
        {"required": ["generate"], "not": {"required": ["users"]}},
    ],
}


def load_scenario(path: str | Path) -> tuple[Scenario, str]:
    """Parse and validate a scenario file; returns (scenario, sha256 digest).

    Missing optional fields take the documented defaults (the standard
    position box, 2.5 GHz carrier, solver tolerances).

    Raises:
        ScenarioFormatError: on JSON syntax errors, schema violations, or
            parameter values that fail the model's own validation.
    """
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(data, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioFormatError(f"{path}: schema violation: {exc.message}") from exc

    try:
        env_spec = data["environment"]
        if isinstance(env_spec, str):
            try:
                environment = environment_by_name(env_spec)
            except KeyError as exc:
                raise ScenarioFormatError(f"{path}: {exc.args[0]}") from exc
        else:
            environment = Environment(**env_spec)

        box_spec = data.get("box")
        if box_spec is None:
            from .scenario import DEFAULT_BOX

            box = DEFAULT_BOX
        else:
            box = PositionBox(**box_spec)

        alt_spec = data.get("altitude", {})
        h_u = alt_spec.get("h_u")
        altitude = AltitudeBounds(
            h_l=float(alt_spec.get("h_l", 0.0)),
            h_u=float("inf") if h_u is None else float(h_u),
        )

        config = SolverConfig(**data.get("solver", {}))

        if "users" in data:
            users = tuple(UserLocation(float(x), float(y)) for x, y in data["users"])
        else:
            gen = data["generate"]
            users = tuple(generate_users(gen["n"], box, gen["seed"]))

        scenario = Scenario(
            users=users,
            box=box,
            environment=environment,
            gamma_db=float(data["gamma_db"]),
            fc_hz=float(data.get("fc_hz", DEFAULT_FC_HZ)),
            altitude_bounds=altitude,
            config=config,
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioFormatError):
            raise
        raise ScenarioFormatError(f"{path}: {exc}") from exc
    return scenario, digest


def placement_document(placement: Placement, scenario: Scenario, input_sha256: str) -> dict:
    """Serializable record of a solved placement plus provenance."""
    return {
        "placement": {
            "x_d": placement.x_d,
            "y_d": placement.y_d,
            "h": placement.h,
            "radius": placement.radius,
            "served": list(placement.served),
            "served_count": placement.served_count,
            "alpha_star": placement.alpha_star,
            "altitude_clamped": placement.altitude_clamped,
            "radius_floor_applied": placement.radius_floor_applied,
        },
        "environment": environment_slug(scenario.environment),
        "gamma_db": scenario.gamma_db,
        "fc_hz": scenario.fc_hz,
        "provenance": {
            "tool": "dronecell",
            "version": __version__,
            "input_sha256": input_sha256,
        },
    }


def write_json_document(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8", newline="\n")


def render_json_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def write_curve_csv(curve: GammaCurve, path: str | Path) -> None:
    """Two-column curve plus a 0/1 peak marker, one row per sample."""
    lines = ["alpha,gamma_m2,peak"]
    for k in range(len(curve.alpha)):
        flag = 1 if curve.peak_index == k else 0
        lines.append(f"{float(curve.alpha[k])!r},{float(curve.gamma_m2[k])!r},{flag}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


STATS_COLUMNS = ("environment", "gamma_db", "users", "runs",
                 "mean", "ci_low", "ci_high", "ci_half_width")


def write_stats_csv(rows: list[dict], path: str | Path) -> None:
    """One row per (environment, threshold) cell of a Monte Carlo sweep."""
    lines = [",".join(STATS_COLUMNS)]
    for row in rows:
        lines.append(",".join(_cell(row[c]) for c in STATS_COLUMNS))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
