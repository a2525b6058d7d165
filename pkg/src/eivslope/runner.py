"""Executes a `RunConfig` and writes its report."""

import json
import math
import sys
from pathlib import Path
from typing import Any, Callable

import pandas
import yaml
from pydantic import BaseModel, ValidationError

from eivslope.config import RunConfig, SimulationConfig, __version__
from eivslope.estimators import (
    ESTIMATORS,
    agreement_stats,
    agreement_table,
    bootstrap_cis,
    ols_intervals,
    slope_estimates,
)
from eivslope.exceptions import EivError, ParseError, TooFewPoints, UnsupportedConfigVersion
from eivslope.logger import LOGGER
from eivslope.parsers import parse_input
from eivslope.posterior import GridSpec, QuadSettings, build_model, sufficient_stats
from eivslope.simulate import DESK_SETTINGS, REFERENCE_SETTINGS, coverage_experiment

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NUMERIC_ERROR = 3

SIGNIFICANT_DIGITS = 10
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

_INPUT_ERRORS = (
    ParseError,
    TooFewPoints,
    UnsupportedConfigVersion,
    ValidationError,
    FileNotFoundError,
    FileExistsError,
    yaml.YAMLError,
)


def _round(value: Any) -> Any:
    """Rounds every float in a JSON-like structure to `SIGNIFICANT_DIGITS`;
    non-finite floats become None."""
    if isinstance(value, BaseModel):
        return _round(value.model_dump())
    if isinstance(value, dict):
        return {key: _round(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(item) for item in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Path):
        return str(value)
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def dumps(payload: Any) -> str:
    return json.dumps(_round(payload), indent=2, ensure_ascii=False) + "\n"


def _fit(config: RunConfig) -> str:
    data = parse_input(config.input_path)
    stats = sufficient_stats(data)
    model = build_model(stats)
    interval = model.shortest_interval(config.level)
    direct, inverted = ols_intervals(stats, config.level)
    return dumps(
        {
            "n": stats.n,
            "nu": stats.nu,
            "r": stats.r,
            "l": stats.l,
            "mean1": stats.mean1,
            "mean2": stats.mean2,
            "median": interval.median,
            "interval": {
                "lower": interval.lower,
                "upper": interval.upper,
                "level": interval.level,
                "unimodal": interval.unimodal,
            },
            "intercept_plugin": stats.mean2 - interval.median * stats.mean1,
            "ols_intervals": [direct, inverted],
        }
    )


def _density(config: RunConfig) -> str:
    stats = sufficient_stats(parse_input(config.input_path))
    model = build_model(stats)
    frame = model.density_grid(GridSpec(points=config.grid_points))
    if config.format == "csv":
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT)
    return dumps(
        {
            "nu": model.nu,
            "r": model.r,
            "l": model.l,
            "rows": frame.to_dict(orient="records"),
        }
    )


def _estimators(config: RunConfig) -> str:
    data = parse_input(config.input_path)
    stats = sufficient_stats(data)
    estimates = slope_estimates(stats)
    names = [name for name in ESTIMATORS if estimates.get(name) is not None]
    cis = bootstrap_cis(
        data,
        names,
        level=config.level,
        replicates=config.boot_reps or 999,
        seed=config.seed,
    )
    if config.format == "csv":
        # one row per point estimate; b2 has no bootstrap interval
        points = {"ols": estimates.b1, "b2": estimates.b2}
        points.update({name: estimates.get(name) for name in ESTIMATORS})
        frame = pandas.DataFrame(
            {"estimator": list(points), "estimate": list(points.values())}
        )
        intervals = pandas.DataFrame(
            [ci.model_dump(exclude={"estimate"}) for ci in cis.values()]
        )
        frame = frame.merge(intervals, on="estimator", how="left")
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT)
    return dumps({"estimates": estimates, "bootstrap": list(cis.values())})


def _agreement(config: RunConfig) -> str:
    data = parse_input(config.input_path, min_points=2)
    stats = agreement_stats(data)
    table = agreement_table(data)
    if config.format == "csv":
        # the summary statistics repeat on every row
        summary = stats.model_dump(exclude={"n"})
        return table.assign(**summary).to_csv(index=False, float_format=FLOAT_FORMAT)
    return dumps({"stats": stats, "points": table.to_dict(orient="records")})


def _simulation_config(config: RunConfig) -> SimulationConfig:
    if config.simulation_config is not None:
        return SimulationConfig.from_file(config.simulation_config)
    if config.full_table1:
        return SimulationConfig(
            config_version=__version__,
            settings=REFERENCE_SETTINGS,
            datasets=config.replicates or 1000,
            boot_reps=config.boot_reps or 999,
            level=config.level,
            seed=config.seed,
            quad=QuadSettings(),
        )
    return SimulationConfig(
        config_version=__version__,
        settings=DESK_SETTINGS,
        datasets=config.replicates or 200,
        boot_reps=config.boot_reps or 199,
        level=config.level,
        seed=config.seed,
    )


def _simulate(config: RunConfig) -> str:
    simulation = _simulation_config(config)
    report = coverage_experiment(
        simulation.settings,
        datasets=simulation.datasets,
        boot_reps=simulation.boot_reps,
        level=simulation.level,
        seed=simulation.seed,
        quad=simulation.quad,
    )
    if config.format == "csv":
        return report.to_csv()
    return dumps(report)


COMMANDS: dict[str, Callable[[RunConfig], str]] = {
    "fit": _fit,
    "density": _density,
    "estimators": _estimators,
    "agreement": _agreement,
    "simulate": _simulate,
}


def _fail(exc: Exception, exit_code: int) -> int:
    LOGGER.debug(f"Failing with exit code {exit_code}: {exc!r}")
    sys.stdout.write(
        dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": exit_code})
    )
    return exit_code


def _emit(text: str, output_path: Path | None) -> None:
    if output_path is None:
        sys.stdout.write(text)
        return
    output_path.write_text(text)
    LOGGER.info(f"Wrote report to {output_path}")


def run(config: RunConfig) -> int:
    """Runs one command and writes its report to `config.output_path`, or to
    stdout.

    Returns:
        The exit status: 0 on success, 2 for unusable input and 3 for a
        numerical failure. On failure, a JSON error record is printed.

    """
    try:
        if config.output_path is not None and config.output_path.exists():
            raise FileExistsError(f"Not overwriting existing file at {config.output_path}")
        _emit(COMMANDS[config.command](config), config.output_path)
    except _INPUT_ERRORS as exc:
        return _fail(exc, EXIT_INPUT_ERROR)
    except EivError as exc:
        return _fail(exc, EXIT_NUMERIC_ERROR)
    return EXIT_OK


def run_options(**options) -> int:
    """Validates command-line options into a `RunConfig` and runs it."""
    try:
        config = RunConfig(**options)
    except ValidationError as exc:
        return _fail(exc, EXIT_INPUT_ERROR)
    return run(config)
