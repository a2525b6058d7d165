from pathlib import Path

import click

from eivslope.runner import run_options

input_option = click.option(
    "--input",
    "input_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Two-column file of paired observations (comma or whitespace separated, "
    "optional header line).",
)
output_option = click.option(
    "--output",
    "output_path",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Where to write the report; stdout if omitted. Existing files are not "
    "overwritten.",
)


def format_option(default: str):
    return click.option(
        "--format",
        "format_",
        type=click.Choice(["csv", "json"]),
        default=default,
        show_default=True,
        help="Report format.",
    )


def level_option(default: float):
    return click.option(
        "--level",
        type=float,
        default=default,
        show_default=True,
        help="Probability content of the intervals.",
    )


@click.group()
def cli():
    """
    Bayesian and classical estimation of the slope of a straight line when both
    coordinates are measured with error.
    """
    pass


@cli.command()
@input_option
@output_option
@level_option(0.95)
@click.pass_context
def fit(ctx, input_path, output_path, level):
    """
    Posterior median and shortest probability interval of the slope.

    Also reports the plug-in intercept (mean2 - median * mean1) and the
    ordinary least squares t-intervals for comparison.
    """
    ctx.exit(
        run_options(
            command="fit", input_path=input_path, output_path=output_path, level=level
        )
    )


@cli.command()
@input_option
@output_option
@click.option(
    "--grid",
    "grid_points",
    type=int,
    default=1001,
    show_default=True,
    help="Number of rows, evenly spaced in θ = arctan(slope / l).",
)
@format_option("csv")
@click.pass_context
def density(ctx, input_path, output_path, grid_points, format_):
    """
    Tabulate the posterior density and CDF of the slope.
    """
    ctx.exit(
        run_options(
            command="density",
            input_path=input_path,
            output_path=output_path,
            grid_points=grid_points,
            format=format_,
        )
    )


@cli.command()
@input_option
@output_option
@level_option(0.95)
@click.option("--seed", type=int, default=0, show_default=True, help="Bootstrap seed.")
@click.option(
    "--boot-reps",
    type=int,
    default=999,
    show_default=True,
    help="Number of bootstrap replicates.",
)
@format_option("json")
@click.pass_context
def estimators(ctx, input_path, output_path, level, seed, boot_reps, format_):
    """
    Classical slope estimates with basic bootstrap confidence intervals.
    """
    ctx.exit(
        run_options(
            command="estimators",
            input_path=input_path,
            output_path=output_path,
            level=level,
            seed=seed,
            boot_reps=boot_reps,
            format=format_,
        )
    )


@cli.command()
@input_option
@output_option
@format_option("json")
@click.pass_context
def agreement(ctx, input_path, output_path, format_):
    """
    Bland-Altman limits of agreement and the per-pair differences and means.
    """
    ctx.exit(
        run_options(
            command="agreement",
            input_path=input_path,
            output_path=output_path,
            format=format_,
        )
    )


@cli.command()
@output_option
@level_option(0.9)
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option(
    "--replicates",
    type=int,
    help="Datasets per setting [default: 200, or 1000 with --full-table1].",
)
@click.option(
    "--boot-reps",
    type=int,
    help="Bootstrap replicates per dataset [default: 199, or 999 with --full-table1].",
)
@click.option(
    "--full-table1",
    is_flag=True,
    help="Run all fifteen published (n, σ1, σ2) settings at full quadrature accuracy.",
)
@click.option(
    "--config",
    "simulation_config",
    type=click.Path(dir_okay=False, path_type=Path),
    help="YAML description of the experiment; overrides the other options.",
)
@format_option("csv")
@click.pass_context
def simulate(
    ctx,
    output_path,
    level,
    seed,
    replicates,
    boot_reps,
    full_table1,
    simulation_config,
    format_,
):
    """
    Coverage of the true slope by posterior and bootstrap intervals on
    simulated data.

    The number of worker processes is read from EIVSLOPE_WORKERS.
    """
    ctx.exit(
        run_options(
            command="simulate",
            output_path=output_path,
            level=level,
            seed=seed,
            replicates=replicates,
            boot_reps=boot_reps,
            full_table1=full_table1,
            simulation_config=simulation_config,
            format=format_,
        )
    )


if __name__ == "__main__":
    cli()
