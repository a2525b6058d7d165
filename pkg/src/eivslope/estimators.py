"""Classical slope estimators, basic bootstrap confidence intervals and
Bland-Altman agreement statistics."""

import math
import warnings
from typing import Iterable, Literal, NamedTuple

import numpy as np
import pandas
import scipy.stats
from pydantic import BaseModel, ConfigDict, Field, model_validator

from eivslope.dataset import Dataset
from eivslope.exceptions import (
    DomainError,
    EstimatorUndefined,
    TooFewPoints,
    ZeroCovariance,
)
from eivslope.logger import LOGGER
from eivslope.posterior import SufficientStats

EstimatorName = Literal["ols", "geometric_mean", "ols_bisector", "orthogonal"]
ESTIMATORS: tuple[EstimatorName, ...] = (
    "ols",
    "geometric_mean",
    "ols_bisector",
    "orthogonal",
)

LOA_MULTIPLIER = 1.96
MIN_BOOTSTRAP_REPLICATES = 100
MAX_FAILURE_FRACTION = 0.1


class SlopeEstimates(BaseModel):
    """Point estimates of the slope, all in units of y2 per unit of y1.

    `b2` is the slope of the regression of y1 on y2 expressed as s22 / s12.
    Everything except `b1` is None when the sample covariance is zero.
    """

    b1: float
    b2: float | None
    geometric_mean: float | None
    ols_bisector: float | None
    orthogonal: float | None
    model_config = ConfigDict(extra="forbid", frozen=True)

    def get(self, name: EstimatorName) -> float | None:
        return self.b1 if name == "ols" else getattr(self, name)


class LimitVariants(NamedTuple):
    """Bisector and orthogonal regression slopes in the limits where one of
    the two error variances dominates."""

    olsb_0: float
    olsb_inf: float
    or_0: float
    or_inf: float


class OLSInterval(BaseModel):
    regression: Literal["y2_on_y1", "y1_on_y2"]
    slope: float
    lower: float | None = Field(
        description="None when the inverted interval is unbounded."
    )
    upper: float | None
    level: float = Field(gt=0, lt=1)
    model_config = ConfigDict(extra="forbid", frozen=True)


class BootstrapCI(BaseModel):
    """Basic bootstrap confidence interval of one estimator."""

    estimator: EstimatorName
    estimate: float
    lower: float
    upper: float
    level: float = Field(gt=0, lt=1)
    replicates: int = Field(ge=1)
    seed: int
    std_error: float = Field(ge=0, description="Standard deviation of the replicates.")
    redraws: int = Field(0, ge=0, description="Resamples drawn again after failing.")
    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def check_order(self) -> "BootstrapCI":
        if self.lower > self.upper:
            raise ValueError(f"Inverted interval ({self.lower}, {self.upper}).")
        return self


class AgreementStats(BaseModel):
    """Bland-Altman summary of the differences y2 - y1."""

    n: int = Field(ge=2)
    mean_diff: float
    sd_diff: float = Field(ge=0)
    loa_lower: float
    loa_upper: float
    cov_diff_mean: float = Field(
        description="Sample covariance of the differences and the pair means."
    )
    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def check_limits(self) -> "AgreementStats":
        for limit, sign in ((self.loa_lower, -1.0), (self.loa_upper, 1.0)):
            expected = self.mean_diff + sign * LOA_MULTIPLIER * self.sd_diff
            if not math.isclose(limit, expected, rel_tol=1e-12, abs_tol=1e-12):
                raise ValueError("Limits of agreement must be mean ± 1.96 SD.")
        return self


def _derived_slopes(b1, b2) -> dict[str, np.ndarray]:
    """Geometric mean, bisector and orthogonal slopes from the two OLS
    slopes; sign(b1) stands in for sign(s12)."""
    sign = np.sign(b1)
    half_gap = 0.5 * (b2 - 1.0 / b1)
    return {
        "geometric_mean": sign * np.sqrt(b1 * b2),
        "ols_bisector": np.tan(0.5 * (np.arctan(b1) + np.arctan(b2))),
        "orthogonal": half_gap + sign * np.sqrt(half_gap * half_gap + 1.0),
    }


def slopes_from_ols(b1: float, b2: float) -> SlopeEstimates:
    """Slope estimates from reported OLS slopes b1 = s12/s11 and b2 = s22/s12.

    Raises:
        DomainError: If b1 and b2 are zero or of opposite signs.

    """
    if not b1 * b2 > 0:
        raise DomainError(f"b1 and b2 must be nonzero with equal signs, got {b1}, {b2}.")
    derived = _derived_slopes(b1, b2)
    return SlopeEstimates(b1=b1, b2=b2, **{k: float(v) for k, v in derived.items()})


def slope_estimates(stats: SufficientStats) -> SlopeEstimates:
    """All point estimates of the slope from the sample moments.

    With zero sample covariance only `b1` (= 0) is defined; the others are
    returned as None with a warning.
    """
    b1 = stats.s12 / stats.s11
    if stats.s12 == 0:
        message = "Zero sample covariance: only the OLS slope b1 is defined."
        LOGGER.warning(message)
        warnings.warn(message)
        return SlopeEstimates(
            b1=b1, b2=None, geometric_mean=None, ols_bisector=None, orthogonal=None
        )
    b2 = stats.s22 / stats.s12
    estimates = slopes_from_ols(b1, b2)
    # |geometric mean| is l by definition
    return estimates.model_copy(
        update={"geometric_mean": math.copysign(stats.l, stats.s12)}
    )


def estimate(stats: SufficientStats, name: EstimatorName) -> float:
    """A single named estimate.

    Raises:
        ZeroCovariance: If the estimator needs a nonzero sample covariance.

    """
    if name not in ESTIMATORS:
        raise DomainError(f"Unknown estimator {name!r}, expected one of {ESTIMATORS}.")
    b1 = stats.s12 / stats.s11
    if name == "ols":
        return b1
    if stats.s12 == 0:
        raise ZeroCovariance(f"The {name} estimator needs a nonzero sample covariance.")
    if name == "geometric_mean":
        return math.copysign(stats.l, stats.s12)
    return getattr(slopes_from_ols(b1, stats.s22 / stats.s12), name)


def limit_variants(b1: float, b2: float) -> LimitVariants:
    """Limits of the bisector and orthogonal slopes: harmonic mean,
    arithmetic mean, b2 and b1.

    Raises:
        DomainError: Unless both slopes are positive.

    """
    if not (b1 > 0 and b2 > 0):
        raise DomainError(f"limit_variants needs b1 > 0 and b2 > 0, got {b1}, {b2}.")
    return LimitVariants(
        olsb_0=2.0 / (1.0 / b1 + 1.0 / b2),
        olsb_inf=0.5 * (b1 + b2),
        or_0=b2,
        or_inf=b1,
    )


def ols_intervals(
    stats: SufficientStats, level: float = 0.95
) -> tuple[OLSInterval, OLSInterval]:
    """Student t confidence intervals of both OLS regressions, the second
    inverted into units of y2 per unit of y1."""
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), not {level}.")
    quantile = float(scipy.stats.t.ppf(0.5 + 0.5 * level, stats.n - 2))
    spread = quantile * math.sqrt((1.0 - stats.r**2) / (stats.n - 2))

    b1 = stats.s12 / stats.s11
    direct = OLSInterval(
        regression="y2_on_y1",
        slope=b1,
        lower=b1 - spread * stats.l,
        upper=b1 + spread * stats.l,
        level=level,
    )

    c = stats.s12 / stats.s22
    c_lower, c_upper = c - spread / stats.l, c + spread / stats.l
    bounded = c_lower * c_upper > 0
    inverted = OLSInterval(
        regression="y1_on_y2",
        slope=1.0 / c if c != 0 else math.inf,
        lower=1.0 / c_upper if bounded else None,
        upper=1.0 / c_lower if bounded else None,
        level=level,
    )
    return direct, inverted


def _resample(n: int, seed: int, replicate: int, attempt: int) -> np.ndarray:
    rng = np.random.default_rng([seed, replicate, attempt])
    return rng.integers(n, size=n)


def _batch_estimates(
    data: Dataset, indices: np.ndarray, names: Iterable[EstimatorName]
) -> dict[str, np.ndarray]:
    """Estimates for each row of resampling indices; NaN where undefined."""
    y1, y2 = data.y1[indices], data.y2[indices]
    d1 = y1 - y1.mean(axis=-1, keepdims=True)
    d2 = y2 - y2.mean(axis=-1, keepdims=True)
    s11 = (d1 * d1).sum(axis=-1)
    s22 = (d2 * d2).sum(axis=-1)
    s12 = (d1 * d2).sum(axis=-1)

    with np.errstate(divide="ignore", invalid="ignore"):
        b1 = s12 / s11
        b2 = s22 / s12
        values = {"ols": b1, **_derived_slopes(b1, b2)}

    defined_ols = s11 > 0
    defined = defined_ols & (s22 > 0) & (s12 != 0)
    return {
        name: np.where(defined_ols if name == "ols" else defined, values[name], np.nan)
        for name in names
    }


def bootstrap_cis(
    data: Dataset,
    estimators: Iterable[EstimatorName] = ESTIMATORS,
    level: float = 0.9,
    replicates: int = 999,
    seed: int = 0,
) -> dict[str, BootstrapCI]:
    """Basic bootstrap intervals for several estimators from one shared set
    of resampled datasets.

    Pairs are resampled with replacement. Replicate `i` draws from a
    generator seeded with `(seed, i, attempt)`, so results do not depend on
    evaluation order. Resamples on which some estimator is undefined are
    drawn again with the next attempt number.

    Parameters:
        data: The observed pairs.
        estimators: Names from `ESTIMATORS`.
        level: Nominal coverage of the intervals.
        replicates: Number of bootstrap datasets, at least 100.
        seed: Master seed.

    Returns:
        A dictionary of estimator name -> `BootstrapCI`.

    Raises:
        DomainError: For invalid arguments.
        EstimatorUndefined: If an estimator is undefined on the data, or if
            more than 10% of the replicates had to be redrawn.

    """
    names = tuple(dict.fromkeys(estimators))
    unknown = set(names) - set(ESTIMATORS)
    if unknown:
        raise DomainError(f"Unknown estimator(s) {sorted(unknown)}.")
    if replicates < MIN_BOOTSTRAP_REPLICATES:
        raise DomainError(
            f"At least {MIN_BOOTSTRAP_REPLICATES} bootstrap replicates are needed."
        )
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), not {level}.")
    if data.n < 3:
        raise TooFewPoints(f"Bootstrapping needs at least 3 pairs, got {data.n}.")

    n = data.n
    observed = _batch_estimates(data, np.arange(n)[None, :], names)
    for name in names:
        if not np.isfinite(observed[name][0]):
            raise EstimatorUndefined(f"The {name} estimator is undefined on the data.")

    indices = np.stack([_resample(n, seed, i, 0) for i in range(replicates)])
    values = _batch_estimates(data, indices, names)
    failed = ~np.all(np.isfinite(np.stack(list(values.values()))), axis=0)

    redraws = 0
    attempt = 0
    while np.any(failed):
        redraws += int(failed.sum())
        if redraws > MAX_FAILURE_FRACTION * replicates:
            raise EstimatorUndefined(
                f"{redraws} of {replicates} bootstrap replicates failed; the "
                "estimators are undefined on too many resamples."
            )
        attempt += 1
        rows = np.flatnonzero(failed)
        for i in rows:
            indices[i] = _resample(n, seed, int(i), attempt)
        redrawn = _batch_estimates(data, indices[rows], names)
        for name in names:
            values[name][rows] = redrawn[name]
        failed = ~np.all(np.isfinite(np.stack(list(values.values()))), axis=0)

    if redraws:
        LOGGER.debug(f"Redrew {redraws} of {replicates} bootstrap resamples")

    alpha = 1.0 - level
    intervals = {}
    for name in names:
        theta_hat = float(observed[name][0])
        q_low, q_high = np.quantile(
            values[name], [0.5 * alpha, 1.0 - 0.5 * alpha], method="weibull"
        )
        intervals[name] = BootstrapCI(
            estimator=name,
            estimate=theta_hat,
            lower=2.0 * theta_hat - float(q_high),
            upper=2.0 * theta_hat - float(q_low),
            level=level,
            replicates=replicates,
            seed=seed,
            std_error=float(np.std(values[name], ddof=1)),
            redraws=redraws,
        )
    return intervals


def bootstrap_ci(
    data: Dataset,
    estimator: EstimatorName,
    level: float = 0.9,
    replicates: int = 999,
    seed: int = 0,
) -> BootstrapCI:
    """Basic bootstrap interval of one estimator, see `bootstrap_cis`."""
    return bootstrap_cis(data, (estimator,), level, replicates, seed)[estimator]


def agreement_stats(data: Dataset) -> AgreementStats:
    """Bland-Altman statistics of the differences y2 - y1.

    Raises:
        TooFewPoints: For fewer than 2 pairs.

    """
    if data.n < 2:
        raise TooFewPoints(f"Agreement statistics need at least 2 pairs, got {data.n}.")
    difference = data.y2 - data.y1
    mean = 0.5 * (data.y1 + data.y2)
    mean_diff = float(np.mean(difference))
    sd_diff = float(np.std(difference, ddof=1))
    return AgreementStats(
        n=data.n,
        mean_diff=mean_diff,
        sd_diff=sd_diff,
        loa_lower=mean_diff - LOA_MULTIPLIER * sd_diff,
        loa_upper=mean_diff + LOA_MULTIPLIER * sd_diff,
        cov_diff_mean=float(np.cov(difference, mean, ddof=1)[0, 1]),
    )


def agreement_table(data: Dataset) -> pandas.DataFrame:
    """Per-pair means and differences, in input order."""
    return pandas.DataFrame(
        {
            "index": np.arange(data.n),
            "y1": data.y1,
            "y2": data.y2,
            "mean": 0.5 * (data.y1 + data.y2),
            "difference": data.y2 - data.y1,
        }
    )


def model_agreement_moments(
    tau: float, beta: float, sigma1: float, sigma2: float
) -> tuple[float, float]:
    """Variance of the differences and their covariance with the pair means
    under the structural model."""
    variance = tau**2 * (beta - 1.0) ** 2 + sigma1**2 + sigma2**2
    covariance = 0.5 * (tau**2 * (beta**2 - 1.0) + sigma2**2 - sigma1**2)
    return variance, covariance
