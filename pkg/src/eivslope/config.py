"""This submodule describes the validated settings of one command-line run
and the YAML file format for coverage experiments.

"""

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from eivslope.exceptions import UnsupportedConfigVersion
from eivslope.posterior import QuadSettings
from eivslope.simulate import DESK_SETTINGS, MIN_DATASETS, CoverageSetting

__version__ = "0.1.0"

Command = Literal["fit", "density", "estimators", "agreement", "simulate"]


class SimulationConfig(BaseModel):
    """A coverage experiment, as described in a YAML file such as

    ```yaml
    config_version: 0.1.0
    datasets: 200
    boot_reps: 199
    level: 0.9
    seed: 1
    settings:
      - {n: 20, sigma1: 0.2, sigma2: 0.2}
    ```

    """

    config_version: str = Field(
        __version__, description="The version of the simulation config format."
    )
    settings: list[CoverageSetting] = Field(
        default_factory=lambda: list(DESK_SETTINGS),
        description="The (n, sigma1, sigma2) combinations to simulate.",
    )
    datasets: int = Field(
        200, ge=MIN_DATASETS, description="Number of datasets per setting."
    )
    boot_reps: int = Field(
        199, ge=100, description="Bootstrap replicates per dataset."
    )
    level: float = Field(0.9, gt=0, lt=1, description="Nominal interval coverage.")
    seed: int = Field(0, description="Master seed of the experiment.")
    quad: QuadSettings = Field(
        default_factory=QuadSettings.desk,
        description="Quadrature settings of the posterior intervals.",
    )
    model_config = ConfigDict(extra="forbid")

    @staticmethod
    def from_file(path: str | Path) -> "SimulationConfig":
        """Load a simulation YAML file from a path."""
        return SimulationConfig.from_string(Path(path).read_text())

    @staticmethod
    def from_string(data: str) -> "SimulationConfig":
        return SimulationConfig(**(yaml.safe_load(data) or {}))

    @model_validator(mode="before")
    @classmethod
    def validate_config_version(cls, values):
        version = values.get("config_version")
        if version is None or str(version) != __version__:
            raise UnsupportedConfigVersion(
                f"Config version must be {__version__}, not {version}."
            )
        return values


class RunConfig(BaseModel):
    """The options of one command-line invocation."""

    command: Command
    input_path: Path | None = Field(None, description="Two-column input file.")
    output_path: Path | None = Field(
        None, description="Report destination; stdout when absent."
    )
    level: float = Field(0.95, gt=0, lt=1, description="Interval probability.")
    grid_points: int = Field(1001, ge=3, description="Rows of the density grid.")
    seed: int = 0
    replicates: int | None = Field(
        None,
        ge=MIN_DATASETS,
        description="Datasets per setting for `simulate`; 200, or 1000 with "
        "`full_table1`.",
    )
    boot_reps: int | None = Field(
        None,
        ge=100,
        description="Bootstrap replicates; 999 for `estimators`, 199 for "
        "`simulate` (999 with `full_table1`).",
    )
    format: Literal["csv", "json"] = "json"
    full_table1: bool = Field(
        False,
        description="Simulate all fifteen published settings at full accuracy.",
    )
    simulation_config: Path | None = Field(
        None, description="YAML file describing the coverage experiment."
    )
    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_input(self) -> "RunConfig":
        if self.command != "simulate" and self.input_path is None:
            raise ValueError(f"The {self.command} command needs an input file.")
        return self
