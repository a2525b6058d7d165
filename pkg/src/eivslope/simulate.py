"""Synthetic data from the structural errors-in-variables model and the
coverage experiment comparing posterior intervals with bootstrap intervals.

The number of worker processes used by `coverage_experiment` defaults to the
`EIVSLOPE_WORKERS` environment variable (1 if unset).

"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pandas
import tqdm
from pydantic import BaseModel, ConfigDict, Field, model_validator

from eivslope.dataset import Dataset
from eivslope.estimators import bootstrap_cis
from eivslope.exceptions import DomainError, EivError
from eivslope.logger import LOGGER
from eivslope.posterior import QuadSettings, build_model, sufficient_stats

WORKERS = int(os.environ.get("EIVSLOPE_WORKERS", "1"))

TRUE_SLOPE = 1.0
MIN_DATASETS = 50
COVERAGE_ESTIMATORS = ("geometric_mean", "ols_bisector", "orthogonal")


class ModelConfig(BaseModel):
    """Parameters of the structural model y1 = ξ1 + u1, y2 = α + β ξ1 + u2
    with ξ1 ~ N(mu1, tau²) and u_k ~ N(0, sigma_k²)."""

    n: int = Field(ge=3, description="Number of pairs.")
    beta: float = TRUE_SLOPE
    alpha: float = 0.0
    mu1: float = 0.0
    tau: float = Field(1.0, gt=0)
    sigma1: float = Field(ge=0)
    sigma2: float = Field(ge=0)
    seed: int = 0
    model_config = ConfigDict(extra="forbid", frozen=True)


class CoverageSetting(BaseModel):
    n: int = Field(ge=3)
    sigma1: float = Field(ge=0)
    sigma2: float = Field(ge=0)
    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def check_noise(self) -> "CoverageSetting":
        if self.sigma1 == 0 and self.sigma2 == 0:
            raise ValueError(
                "At least one error SD must be positive: noise-free data lie on a "
                "line and have |r| = 1."
            )
        return self


class CoverageRow(BaseModel):
    n: int
    sigma1: float
    sigma2: float
    posterior_coverage: float | None = Field(ge=0, le=100)
    gm_coverage: float | None = Field(ge=0, le=100)
    olsb_coverage: float | None = Field(ge=0, le=100)
    or_coverage: float | None = Field(ge=0, le=100)
    evaluated: int = Field(ge=0)
    excluded: int = Field(ge=0)


class CoverageReport(BaseModel):
    """Coverage percentages per setting."""

    rows: list[CoverageRow]
    datasets: int
    boot_reps: int
    level: float
    seed: int

    def to_frame(self) -> pandas.DataFrame:
        return pandas.DataFrame([row.model_dump() for row in self.rows])

    def to_csv(self, path: Path | str | None = None) -> str:
        text = self.to_frame().to_csv(index=False, float_format="%.10g")
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2)


def _settings(*rows: tuple[int, float, float]) -> list[CoverageSetting]:
    return [CoverageSetting(n=n, sigma1=s1, sigma2=s2) for n, s1, s2 in rows]


_NOISE_LEVELS = ((0.05, 1.0), (0.1, 0.5), (0.2, 0.2), (0.5, 0.1), (1.0, 0.05))

REFERENCE_SETTINGS = _settings(
    *((n, s1, s2) for n in (20, 50, 100) for s1, s2 in _NOISE_LEVELS)
)

# published coverages (%) of 90% intervals from 1000 datasets:
# posterior, geometric mean, OLS bisector, orthogonal regression
REFERENCE_COVERAGE: dict[tuple[int, float, float], tuple[float, float, float, float]] = {
    (20, 0.05, 1.0): (86.5, 52.5, 49.8, 77.3),
    (20, 0.1, 0.5): (89.9, 79.1, 78.2, 81.1),
    (20, 0.2, 0.2): (92.8, 84.8, 84.6, 85.3),
    (20, 0.5, 0.1): (82.9, 64.0, 63.5, 65.1),
    (20, 1.0, 0.05): (72.2, 21.3, 24.4, 20.3),
    (50, 0.05, 1.0): (80.7, 7.8, 7.2, 22.4),
    (50, 0.1, 0.5): (83.9, 56.3, 55.8, 58.9),
    (50, 0.2, 0.2): (94.6, 88.0, 88.0, 88.3),
    (50, 0.5, 0.1): (75.8, 40.4, 40.4, 41.0),
    (50, 1.0, 0.05): (54.4, 3.2, 3.4, 2.8),
    (100, 0.05, 1.0): (71.6, 0.3, 0.2, 0.9),
    (100, 0.1, 0.5): (75.5, 30.2, 30.1, 30.9),
    (100, 0.2, 0.2): (96.6, 88.0, 88.0, 88.1),
    (100, 0.5, 0.1): (71.5, 23.3, 23.2, 22.8),
    (100, 1.0, 0.05): (42.1, 0.1, 0.1, 0.0),
}

DESK_SETTINGS = _settings((20, 0.2, 0.2), (100, 1.0, 0.05))


def derive_seed(master: int, *indices: int) -> int:
    """A seed determined by the master seed and the given indices only."""
    sequence = np.random.SeedSequence([master, *indices])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def model_covariance(config: ModelConfig) -> np.ndarray:
    """Covariance matrix of (y1, y2) under the structural model."""
    tau2 = config.tau**2
    return np.array(
        [
            [tau2 + config.sigma1**2, config.beta * tau2],
            [config.beta * tau2, config.beta**2 * tau2 + config.sigma2**2],
        ]
    )


def generate_dataset(config: ModelConfig) -> Dataset:
    """Draws `config.n` pairs from the structural model, deterministically
    for a given `config.seed`."""
    rng = np.random.default_rng(config.seed)
    xi1 = rng.normal(config.mu1, config.tau, size=config.n)
    u1 = rng.normal(0.0, config.sigma1, size=config.n)
    u2 = rng.normal(0.0, config.sigma2, size=config.n)
    return Dataset(y1=xi1 + u1, y2=config.alpha + config.beta * xi1 + u2)


def _evaluate_dataset(
    job: tuple[CoverageSetting, int, int, float, QuadSettings],
) -> tuple[bool, bool, bool, bool] | None:
    """Containment of the true slope by the posterior interval and the three
    bootstrap intervals, or None if the dataset could not be evaluated."""
    setting, dataset_seed, boot_reps, level, quad = job
    data = generate_dataset(
        ModelConfig(
            n=setting.n, sigma1=setting.sigma1, sigma2=setting.sigma2, seed=dataset_seed
        )
    )
    try:
        interval = build_model(sufficient_stats(data), quad).shortest_interval(level)
        cis = bootstrap_cis(
            data,
            COVERAGE_ESTIMATORS,
            level=level,
            replicates=boot_reps,
            seed=derive_seed(dataset_seed, 1),
        )
    except EivError as exc:
        LOGGER.debug(f"Excluding dataset with seed {dataset_seed}: {exc!r}")
        return None

    return (
        interval.lower <= TRUE_SLOPE <= interval.upper,
        *(cis[name].lower <= TRUE_SLOPE <= cis[name].upper for name in COVERAGE_ESTIMATORS),
    )


def _run_jobs(jobs: list, workers: int, description: str) -> list:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(
                tqdm.tqdm(
                    pool.map(_evaluate_dataset, jobs, chunksize=8),
                    total=len(jobs),
                    desc=description,
                )
            )
    return [_evaluate_dataset(job) for job in tqdm.tqdm(jobs, desc=description)]


def coverage_experiment(
    settings: list[CoverageSetting],
    datasets: int = 200,
    boot_reps: int = 199,
    level: float = 0.9,
    seed: int = 0,
    quad: QuadSettings | None = None,
    workers: int | None = None,
) -> CoverageReport:
    """Empirical coverage of the true slope β = 1 by shortest posterior
    intervals and basic bootstrap intervals.

    Each setting draws `datasets` datasets with α = 0, μ1 = 0 and τ = 1.
    Dataset `d` of setting `s` uses the seed `derive_seed(seed, s, d, 0)`,
    so results do not depend on `workers`. Datasets on which any interval
    fails are excluded and counted.

    Parameters:
        settings: The (n, sigma1, sigma2) combinations to run.
        datasets: Datasets per setting, at least 50.
        boot_reps: Bootstrap replicates per dataset.
        level: Nominal coverage of every interval.
        seed: Master seed.
        quad: Quadrature settings for the posterior, `QuadSettings.desk()` by default.
        workers: Number of worker processes.

    Returns:
        A `CoverageReport` with one row per setting.

    """
    if datasets < MIN_DATASETS:
        raise DomainError(f"At least {MIN_DATASETS} datasets per setting are needed.")
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), not {level}.")
    quad = quad or QuadSettings.desk()
    workers = workers or WORKERS

    rows = []
    for s, setting in enumerate(settings):
        jobs = [
            (setting, derive_seed(seed, s, d, 0), boot_reps, level, quad)
            for d in range(datasets)
        ]
        description = f"n={setting.n} σ1={setting.sigma1} σ2={setting.sigma2}"
        outcomes = [o for o in _run_jobs(jobs, workers, description) if o is not None]

        excluded = datasets - len(outcomes)
        if excluded:
            LOGGER.warning(f"{description}: excluded {excluded} of {datasets} datasets")

        if outcomes:
            percentages = [float(p) for p in 100.0 * np.mean(outcomes, axis=0)]
        else:
            percentages = [None] * 4
        rows.append(
            CoverageRow(
                n=setting.n,
                sigma1=setting.sigma1,
                sigma2=setting.sigma2,
                posterior_coverage=percentages[0],
                gm_coverage=percentages[1],
                olsb_coverage=percentages[2],
                or_coverage=percentages[3],
                evaluated=len(outcomes),
                excluded=excluded,
            )
        )
        LOGGER.info(f"{description}: {rows[-1].model_dump()}")

    return CoverageReport(
        rows=rows, datasets=datasets, boot_reps=boot_reps, level=level, seed=seed
    )
