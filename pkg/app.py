"""
FRBE Numerical Laboratory - Command Line

Commands:
1. eval - Special functions (Mittag-Leffler, Gamma, erfc, Bessel K, theta)
2. spectral - Spectral density of the initial condition
3. cov - Exact covariance of the solution field
4. limit - Covariance of the scaling-limit field
5. msd - Coupled mean-square distance certificates over an eps grid
6. simulate - Monte Carlo covariance estimates of the solution field
7. experiment - Monte Carlo convergence experiment against the limit
8. figures - Long-memory limit covariance curves

Usage:
    python app.py <command> [--config PATH] [--out PATH] [--seed N] [--eps E ...]
"""

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from core.errors import ConfigError, Diagnostic, FrbeError
from core.frbe import SpaceTimePoint, solution_covariance
from core.scaling_limits import certificate_sweep, limit_covariance_cyclic, limit_covariance_lrd, ScalingRegime
from core.scenarios import figure_model
from core.simulation import (
    SpectralSimulator,
    build_spectral_grid,
    discrete_solution_covariance,
    empirical_covariance,
    mc_convergence_experiment,
)
from core.specfun import bessel_k, erfc, gamma_fn, mittag_leffler
from core.spectral_model import spectral_density, spectral_density_bessel, spectral_density_rv, theta
from utils.config_io import COMMANDS, RunConfig, frange, load_config, parse_config
from utils.data_processing import DataProcessor, ReportGenerator

logger = logging.getLogger("frbe")

# Command result: named tables and the number of failed rows.
CommandResult = Tuple[Dict[str, pd.DataFrame], int]

FIGURE_LAG_FILE = "figure_lag.csv"
FIGURE_TIME_FILE = "figure_time.csv"


def _guarded(func: Callable[[], float], label: str) -> Tuple[float, int]:
    """Evaluate one row; library failures become NaN and count as one error."""
    try:
        return float(func()), 0
    except FrbeError as err:
        logger.warning("row %s failed: %s", label, err)
        return math.nan, 1


def _pairs(points: Sequence[Tuple[float, float]]) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(len(points)) for j in range(i, len(points))]


def _kappa_column(kappa: float) -> str:
    return "cov_k" + f"{kappa:g}".replace("0.", "0").replace(".", "")


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_eval(config: RunConfig) -> CommandResult:
    """Special-function values over ``values`` with parameter ``order``."""
    sf = config.sf_config()
    order = config.order
    functions = {
        "mittag_leffler": lambda v: mittag_leffler(order, v, sf),
        "gamma": lambda v: gamma_fn(v),
        "erfc": lambda v: erfc(v),
        "bessel_k": lambda v: bessel_k(order, v),
        "theta": lambda v: theta(order, v),
    }
    func = functions[config.function]
    rows, errors = [], 0
    for v in config.values:
        value, failed = _guarded(lambda: func(v), f"{config.function}({v:g})")
        errors += failed
        rows.append({"function": config.function, "order": order, "argument": v, "value": value})
    return {"eval": pd.DataFrame(rows, columns=["function", "order", "argument", "value"])}, errors


def cmd_spectral(config: RunConfig) -> CommandResult:
    """Spectral density in both forms at ``lambdas``."""
    model = config.model
    rows, errors = [], 0
    for lam in config.lambdas:
        density, e1 = _guarded(lambda: spectral_density(model, lam), f"f({lam:g})")
        bessel, e2 = _guarded(lambda: spectral_density_bessel(model, lam), f"f_K({lam:g})")
        row = {"lambda": lam, "density": density, "density_bessel": bessel}
        failed = e1 or e2
        if model.slowly_varying is not None:
            row["density_rv"], e3 = _guarded(lambda: spectral_density_rv(model, None, lam), f"f_L({lam:g})")
            failed = failed or e3
        errors += int(bool(failed))
        rows.append(row)
    return {"spectral": pd.DataFrame(rows)}, errors


def cmd_cov(config: RunConfig) -> CommandResult:
    """Exact solution covariance for every pair of ``points``."""
    quad, sf = config.quad_config(), config.sf_config()
    rows, errors = [], 0
    for i, j in _pairs(config.points):
        (t, x), (t2, x2) = config.points[i], config.points[j]
        value, failed = _guarded(
            lambda: solution_covariance(config.params, config.model, t, t2, x, x2, quad, sf),
            f"cov({i},{j})",
        )
        errors += failed
        rows.append({"t": t, "x": x, "t2": t2, "x2": x2, "covariance": value})
    return {"cov": pd.DataFrame(rows)}, errors


def cmd_limit(config: RunConfig) -> CommandResult:
    """Limit-field covariance for every pair of ``points``; ``constant`` overrides the default constant."""
    quad = config.quad_config()
    cyclic = config.regime is ScalingRegime.CYCLIC
    rows, errors = [], 0
    for i, j in _pairs(config.points):
        (t, x), (t2, x2) = config.points[i], config.points[j]
        if cyclic:
            func = lambda: limit_covariance_cyclic(config.params, config.model, t, t2, x, x2,
                                                   constant=config.constant, config=quad)
        else:
            func = lambda: limit_covariance_lrd(config.params, config.model, t, t2, x, x2,
                                                prefactor=config.constant, config=quad)
        value, failed = _guarded(func, f"limit({i},{j})")
        errors += failed
        rows.append({"t": t, "x": x, "t2": t2, "x2": x2, "limit_covariance": value})
    return {"limit": pd.DataFrame(rows)}, errors


def cmd_msd(config: RunConfig) -> CommandResult:
    """Certificate sweep over ``eps_grid`` and ``times``."""
    sweep = certificate_sweep(config.regime, config.params, config.model, config.eps_grid,
                              config.times, workers=config.workers, config=config.quad_config())
    return {"msd": sweep}, DataProcessor.count_failed_rows(sweep)


def cmd_simulate(config: RunConfig) -> CommandResult:
    """Monte Carlo covariance estimates at ``points`` (t = 0 samples the initial condition)."""
    mc = config.mc_config()
    grid = build_spectral_grid(config.model, config.model.slowly_varying, mc.grid_cells, mc.tail_mass)
    sample = SpectralSimulator(grid, config.params, mc).sample(config.points)
    pairs = _pairs(config.points)
    estimates = empirical_covariance(sample, pairs)
    rows = []
    for (i, j), est in zip(pairs, estimates):
        (t, x), (t2, x2) = config.points[i], config.points[j]
        rows.append({
            "t": t, "x": x, "t2": t2, "x2": x2,
            "estimate": est.estimate,
            "standard_error": est.standard_error,
            "grid_covariance": discrete_solution_covariance(config.params, grid, (t, x), (t2, x2)),
        })
    return {"simulate": pd.DataFrame(rows)}, 0


def cmd_experiment(config: RunConfig) -> CommandResult:
    """Monte Carlo convergence experiment over ``eps_grid``."""
    points = [SpaceTimePoint(t, x) for t, x in config.points]
    report = mc_convergence_experiment(config.regime, config.params, config.model,
                                       config.eps_grid, points, config.mc_config())
    logger.info("\n%s", ReportGenerator.experiment_summary(report, config.regime.value, config.replicates))
    return {"experiment": report}, 0


def cmd_figures(config: RunConfig) -> CommandResult:
    """
    Long-memory limit covariance curves with unit prefactor, one column per kappa0.

    Lag file: t = t' = 1 over h. Time file: t = 1, h = 1 over t'.
    """
    params = config.params
    quad = config.quad_config()
    lags = frange(config.h_min, config.h_max, config.h_step)
    tprimes = frange(config.tprime_min, config.tprime_max, config.tprime_step)
    lag_frame = pd.DataFrame({"h": lags})
    time_frame = pd.DataFrame({"tprime": tprimes})
    errors = 0
    for kappa in config.kappas:
        model = figure_model(kappa)
        column = _kappa_column(kappa)
        by_abs: Dict[float, float] = {}
        values = []
        for h in lags:
            key = abs(h)
            if key not in by_abs:
                value, failed = _guarded(
                    lambda: limit_covariance_lrd(params, model, 1.0, 1.0, key, 0.0, prefactor=1.0, config=quad),
                    f"{column}(h={key:g})",
                )
                by_abs[key] = value
                errors += failed
            values.append(by_abs[key])
        lag_frame[column] = values
        values = []
        for tp in tprimes:
            value, failed = _guarded(
                lambda: limit_covariance_lrd(params, model, 1.0, tp, 1.0, 0.0, prefactor=1.0, config=quad),
                f"{column}(t'={tp:g})",
            )
            errors += failed
            values.append(value)
        time_frame[column] = values
    return {FIGURE_LAG_FILE: lag_frame, FIGURE_TIME_FILE: time_frame}, errors


COMMAND_TABLE: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "eval": cmd_eval,
    "spectral": cmd_spectral,
    "cov": cmd_cov,
    "limit": cmd_limit,
    "msd": cmd_msd,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "figures": cmd_figures,
}


# =============================================================================
# ENTRY POINT
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frbe",
        description="Numerical laboratory for the fractional Riesz-Bessel equation "
                    "with long-memory initial conditions.",
    )
    parser.add_argument("command", choices=COMMANDS, help="command to run")
    parser.add_argument("--config", help="run config file (key = value)")
    parser.add_argument("--out", help="output CSV file (figures: output directory)")
    parser.add_argument("--seed", type=int, help="override the Monte Carlo seed")
    parser.add_argument("--eps", type=float, nargs="+", help="override the eps grid")
    parser.add_argument("--workers", type=int, help="override the worker count")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file (or defaults) with command-line overrides applied."""
    if args.config:
        config = load_config(args.config, args.command)
    else:
        config = parse_config("", args.command)
    overrides = {}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError([Diagnostic(0, "--seed", "seed must be non-negative", "seed >= 0")], "command line")
        overrides["seed"] = args.seed
    if args.eps is not None:
        if not all(0.0 < e <= 1.0 for e in args.eps):
            raise ConfigError([Diagnostic(0, "--eps", "eps values must lie in (0, 1]", "0 < eps <= 1")],
                              "command line")
        overrides["eps_grid"] = list(args.eps)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError([Diagnostic(0, "--workers", "workers must be positive", "workers >= 1")],
                              "command line")
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output"] = args.out
    return dataclasses.replace(config, **overrides)


def write_outputs(command: str, tables: Dict[str, pd.DataFrame], output: Optional[str]) -> None:
    if command == "figures":
        directory = Path(output) if output else Path(".")
        directory.mkdir(parents=True, exist_ok=True)
        for name, frame in tables.items():
            DataProcessor.write_csv(frame, str(directory / name))
        return
    for frame in tables.values():
        text = DataProcessor.write_csv(frame, output)
        if output is None:
            sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        Exit status: 0 on success, 1 when some rows failed (written as nan),
        2 when the command could not run
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(args)
        logger.info("running %s", args.command)
        tables, errors = COMMAND_TABLE[args.command](config)
        write_outputs(args.command, tables, config.output)
    except FrbeError as err:
        message = str(err).replace('"', "'")
        sys.stderr.write(f'error code={err.code} type={type(err).__name__} message="{message}"\n')
        return 2
    logger.info("finished %s with %d failed rows", args.command, errors)
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
