"""Command-line interface.

Four subcommands: ``solve`` (one scenario file -> placement JSON),
``alpha-star`` (optimal ratio for an environment), ``gamma-curve``
(CSV curve per environment), ``montecarlo`` (statistics table over an
environment/threshold grid). Outputs are pure functions of the input bytes
and flags; ``--plot`` additionally renders a figure next to each data file.

Exit codes: 0 success, 2 validation or parse error, 3 infeasible placement,
4 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .alpha import SolverConfig, find_alpha_star, gamma_curve
from .channel import (PRESET_SLUGS, LinkBudget, environment_by_name, environment_slug)
from .coverage import InfeasiblePlacementError, place_drone
from .formats import (ScenarioFormatError, load_scenario, placement_document,
                      render_json_document, write_curve_csv, write_json_document,
                      write_stats_csv)
from .scenario import (DEFAULT_FC_HZ, DEFAULT_GAMMAS_DB, DEFAULT_RUNS,
                       DEFAULT_USER_COUNT, DEFAULT_BOX, Scenario, run_monte_carlo)

OUT_DIR_ENV_VAR = "DRONECELL_OUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4


def _out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV_VAR, "."))


def _solver_config(args) -> SolverConfig:
    kwargs = {}
    if args.epsilon is not None:
        kwargs["epsilon"] = args.epsilon
    if args.max_iter is not None:
        kwargs["max_iterations"] = args.max_iter
    return SolverConfig(**kwargs)


def _env_list(arg: str):
    if arg.strip().lower() == "all":
        return [environment_by_name(slug) for slug in PRESET_SLUGS]
    envs = []
    for part in arg.split(","):
        if part.strip():
            envs.append(environment_by_name(part))
    if not envs:
        raise ScenarioFormatError(f"no environments in {arg!r}")
    return envs


def _gamma_list(arg: str) -> list[float]:
    try:
        values = [float(part) for part in arg.split(",") if part.strip()]
    except ValueError as exc:
        raise ScenarioFormatError(f"bad threshold list {arg!r}: {exc}") from exc
    if not values:
        raise ScenarioFormatError(f"no thresholds in {arg!r}")
    return values


def cmd_solve(args) -> int:
    scenario, digest = load_scenario(args.scenario)
    budget = scenario.budget()
    placement = place_drone(scenario.users, scenario.environment, budget,
                            scenario.box, scenario.altitude_bounds, scenario.config)
    out = Path(args.out) if args.out else (
        _out_dir() / (Path(args.scenario).stem + ".placement.json"))
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json_document(placement_document(placement, scenario, digest), out)
    print(out)
    if args.plot:
        from . import plotting

        fig_path = out.with_name(out.stem + ".png")
        plotting.save_placement_plot(placement, list(scenario.users), scenario.box,
                                     fig_path, label=environment_slug(scenario.environment))
        print(fig_path)
    return EXIT_OK


def cmd_alpha_star(args) -> int:
    env = environment_by_name(args.env)
    budget = LinkBudget.for_environment(env, args.gamma, args.fc)
    sol = find_alpha_star(env, budget, _solver_config(args))
    doc = {
        "environment": environment_slug(env),
        "gamma_db": args.gamma,
        "fc_hz": args.fc,
        "alpha_star": sol.alpha_star,
        "gamma_at_star_m2": sol.gamma_at_star,
        "max_radius_m": sol.max_radius,
        "iterations": sol.iterations,
        "converged": sol.converged,
    }
    print(render_json_document(doc))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_json_document(doc, args.out)
    return EXIT_OK


def cmd_gamma_curve(args) -> int:
    envs = _env_list(args.env)
    config = _solver_config(args)
    out_dir = Path(args.out) if args.out else _out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = {}
    for env in envs:
        budget = LinkBudget.for_environment(env, args.gamma, args.fc)
        curve = gamma_curve(env, budget, args.samples, config)
        slug = environment_slug(env)
        curves[slug] = curve
        path = out_dir / f"gamma_curve_{slug}.csv"
        write_curve_csv(curve, path)
        print(path)
    if args.plot:
        from . import plotting

        fig_path = out_dir / "gamma_curve.png"
        plotting.save_gamma_curve_plot(curves, fig_path)
        print(fig_path)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    envs = _env_list(args.env)
    gammas = _gamma_list(args.gamma)
    config = _solver_config(args)
    rows = []
    for env in envs:
        for gamma_db in gammas:
            template = Scenario(users=(), box=DEFAULT_BOX, environment=env,
                                gamma_db=gamma_db, fc_hz=args.fc, config=config)
            try:
                stats = run_monte_carlo(template, args.users, args.runs, args.seed)
            except InfeasiblePlacementError as exc:
                raise InfeasiblePlacementError(
                    f"cell (env={environment_slug(env)}, gamma={gamma_db} dB): {exc}"
                ) from exc
            rows.append({
                "environment": environment_slug(env),
                "gamma_db": gamma_db,
                "users": args.users,
                "runs": args.runs,
                "mean": stats.mean,
                "ci_low": stats.ci_low,
                "ci_high": stats.ci_high,
                "ci_half_width": stats.ci_half_width,
            })
    out = Path(args.out) if args.out else _out_dir() / "montecarlo.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_stats_csv(rows, out)
    print(out)
    if args.plot:
        from . import plotting

        fig_path = out.with_name(out.stem + ".png")
        plotting.save_montecarlo_plot(rows, fig_path)
        print(fig_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dronecell",
        description="3-D placement of an aerial base station over ground users.",
    )
    parser.add_argument("--version", action="version", version=f"dronecell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one scenario file")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", help="output placement JSON path")
    p.add_argument("--plot", action="store_true", help="also render a placement map PNG")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("alpha-star", help="optimal altitude-to-radius ratio")
    p.add_argument("--env", required=True, help="environment name")
    p.add_argument("--gamma", type=float, required=True, help="pathloss threshold (dB)")
    p.add_argument("--fc", type=float, default=DEFAULT_FC_HZ, help="carrier frequency (Hz)")
    p.add_argument("--epsilon", type=float, default=None, help="bisection tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="bisection iteration cap")
    p.add_argument("--out", help="optionally also write the JSON document here")
    p.set_defaults(func=cmd_alpha_star)

    p = sub.add_parser("gamma-curve", help="squared-radius curve per environment (CSV)")
    p.add_argument("--env", default="all", help="'all' or comma-separated environment names")
    p.add_argument("--gamma", type=float, required=True, help="pathloss threshold (dB)")
    p.add_argument("--fc", type=float, default=DEFAULT_FC_HZ, help="carrier frequency (Hz)")
    p.add_argument("--samples", type=int, default=400, help="curve sample count")
    p.add_argument("--epsilon", type=float, default=None, help="bisection tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="bisection iteration cap")
    p.add_argument("--out", help="output directory for the CSV files")
    p.add_argument("--plot", action="store_true", help="also render a combined curve PNG")
    p.set_defaults(func=cmd_gamma_curve)

    p = sub.add_parser("montecarlo", help="Monte Carlo statistics over an env/threshold grid")
    p.add_argument("--users", type=int, default=DEFAULT_USER_COUNT, help="users per run")
    p.add_argument("--runs", type=int, default=DEFAULT_RUNS, help="Monte Carlo runs per cell")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--env", default="all", help="'all' or comma-separated environment names")
    p.add_argument("--gamma", default=",".join(f"{g:g}" for g in DEFAULT_GAMMAS_DB),
                   help="comma-separated pathloss thresholds (dB)")
    p.add_argument("--fc", type=float, default=DEFAULT_FC_HZ, help="carrier frequency (Hz)")
    p.add_argument("--epsilon", type=float, default=None, help="bisection tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="bisection iteration cap")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--plot", action="store_true", help="also render a bar-chart PNG")
    p.set_defaults(func=cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioFormatError, KeyError, ValueError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasiblePlacementError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
