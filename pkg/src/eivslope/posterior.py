"""Marginal posterior density of the slope in the bivariate normal
errors-in-variables model.

The density depends on the data only through the degrees of freedom `nu`,
the sample correlation `r` and the ratio of standard deviations `l`. Most
of the work is done in terms of the scale invariant slope
`beta_tilde = beta / l` and its angle `theta = arctan(beta_tilde)`, under
which the Cauchy prior of `beta_tilde` is uniform.

"""

import math
from functools import cached_property
from typing import Literal

import numpy as np
import pandas
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import cumulative_trapezoid, tanhsinh
from scipy.optimize import bisect, minimize_scalar

from eivslope import specfun
from eivslope.dataset import Dataset
from eivslope.exceptions import (
    DegenerateVariance,
    DomainError,
    PerfectCorrelation,
    QuadratureFailure,
    TooFewPoints,
)
from eivslope.logger import LOGGER

# stands in for beta_tilde -> infinity, e.g. in J(0) = I(0) + I(inf)
BETA_TILDE_MAX = 1e8

CORRELATION_LIMIT = 1.0 - 1e-12
QUANTILE_XTOL = 1e-12
CDF_ATOL = 1e-13
INTERVAL_SCAN_POINTS = 201
UNIMODAL_RTOL = 1e-6

# θ pieces of the normalization integral, and how often pieces that miss
# the tolerance are halved before giving up
NORMALIZATION_PIECES = 8
NORMALIZATION_SPLITS = 4

# inner integrals over fewer ulps of φ than this, or over less than the
# absolute tolerance, are taken as zero
_MIN_PHI_ULPS = 8

_HALF_PI = 0.5 * math.pi


class QuadSettings(BaseModel):
    """Accuracy controls for the nested quadratures and the θ grid."""

    rtol: float = Field(
        1e-10, gt=0, description="Relative tolerance of every adaptive quadrature."
    )
    atol: float = Field(
        1e-13, ge=0, description="Absolute tolerance of every adaptive quadrature."
    )
    max_level: int = Field(
        10,
        ge=2,
        description="Refinement cap of the tanh-sinh rule; reaching it without meeting "
        "the tolerances raises `QuadratureFailure`.",
    )
    grid_points: int = Field(
        4001,
        ge=3,
        description="Number of θ nodes of the grid behind the CDF, quantiles and "
        "interval search.",
    )
    tolerance: specfun.Tolerance = Field(
        default_factory=specfun.Tolerance,
        description="Stopping rule of the incomplete beta continued fraction.",
    )
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("grid_points")
    @classmethod
    def check_odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(
                f"grid_points must be odd so that θ = 0 is a grid node, not {value}."
            )
        return value

    @classmethod
    def desk(cls) -> "QuadSettings":
        """Looser settings for repeated fits, e.g. in coverage experiments."""
        return cls(
            rtol=1e-7,
            atol=1e-10,
            grid_points=801,
            tolerance=specfun.Tolerance(rel_eps=1e-10),
        )


class SufficientStats(BaseModel):
    """Sample moments of a dataset, with divisor n - 1."""

    n: int = Field(ge=3)
    nu: float = Field(gt=1, description="Degrees of freedom, n - 1.")
    mean1: float
    mean2: float
    s11: float = Field(gt=0)
    s22: float = Field(gt=0)
    s12: float
    r: float = Field(gt=-1, lt=1, description="Sample correlation coefficient.")
    l: float = Field(gt=0, description="Ratio of standard deviations √(s22/s11).")  # noqa: E741
    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def check_consistency(self) -> "SufficientStats":
        if abs(self.r - self.s12 / math.sqrt(self.s11 * self.s22)) > 1e-12:
            raise ValueError("r is inconsistent with s11, s22 and s12.")
        return self


class IntervalEstimate(BaseModel):
    lower: float
    upper: float
    level: float = Field(gt=0, lt=1)
    median: float
    unimodal: bool = Field(
        True,
        description="False if the width of [quantile(a), quantile(a + level)] "
        "was not unimodal in a, in which case the shortest scanned interval is "
        "returned. Intervals with level <= 0.5 may exclude the median, e.g. "
        "one around a single mode of a bimodal posterior.",
    )
    start_probability: float | None = Field(
        None, description="Posterior mass below `lower`."
    )
    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def check_order(self) -> "IntervalEstimate":
        if not self.lower < self.upper:
            raise ValueError(f"Empty interval ({self.lower}, {self.upper}).")
        # any interval holding more than half the mass covers the median
        covers_median = self.lower <= self.median <= self.upper
        if self.unimodal and self.level > 0.5 and not covers_median:
            raise ValueError(
                f"The median {self.median} lies outside the {self.level} interval "
                f"({self.lower}, {self.upper})."
            )
        return self


class GridSpec(BaseModel):
    """Where to tabulate the posterior in `PosteriorModel.density_grid`."""

    points: int = Field(1001, ge=3)
    scale: Literal["theta", "beta"] = Field(
        "theta",
        description="'theta' spaces rows evenly in θ over (-π/2, π/2); 'beta' spaces "
        "them evenly in the slope between `beta_min` and `beta_max`.",
    )
    beta_min: float | None = None
    beta_max: float | None = None
    edge: float = Field(
        1e-6, gt=0, lt=0.1, description="Distance of the θ grid ends from ±π/2."
    )
    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_beta_range(self) -> "GridSpec":
        if self.scale == "beta":
            if self.beta_min is None or self.beta_max is None:
                raise ValueError("A 'beta' grid needs both beta_min and beta_max.")
            if not (
                math.isfinite(self.beta_min)
                and math.isfinite(self.beta_max)
                and self.beta_min < self.beta_max
            ):
                raise ValueError(
                    f"Invalid slope range [{self.beta_min}, {self.beta_max}]."
                )
        return self


DEFAULT_QUAD = QuadSettings()


def sufficient_stats(data: Dataset) -> SufficientStats:
    """Computes the sufficient statistics of a dataset.

    Raises:
        TooFewPoints: For fewer than 3 pairs.
        DegenerateVariance: If either column is constant.
        PerfectCorrelation: If |r| >= 1 - 1e-12.

    """
    n = data.n
    if n < 3:
        raise TooFewPoints(f"The posterior needs at least 3 pairs, got {n}.")

    mean1, mean2 = float(np.mean(data.y1)), float(np.mean(data.y2))
    d1, d2 = data.y1 - mean1, data.y2 - mean2
    s11 = float(d1 @ d1) / (n - 1)
    s22 = float(d2 @ d2) / (n - 1)
    s12 = float(d1 @ d2) / (n - 1)
    if s11 <= 0 or s22 <= 0:
        raise DegenerateVariance(
            f"Both columns need nonzero variance, got s11={s11}, s22={s22}."
        )

    r = s12 / math.sqrt(s11 * s22)
    if abs(r) >= CORRELATION_LIMIT:
        raise PerfectCorrelation(f"The points lie on a line (r = {r}).")

    return SufficientStats(
        n=n,
        nu=n - 1,
        mean1=mean1,
        mean2=mean2,
        s11=s11,
        s22=s22,
        s12=s12,
        r=r,
        l=math.sqrt(s22 / s11),
    )


def _check_model_parameters(nu: float, r: float, l: float) -> None:  # noqa: E741
    if not (nu > 1 and math.isfinite(nu)):
        raise DomainError(f"The posterior needs finite nu > 1, not {nu}.")
    if not abs(r) < 1:
        raise DomainError(f"The posterior needs |r| < 1, not {r}.")
    if not (l > 0 and math.isfinite(l)):
        raise DomainError(f"The posterior needs finite l > 0, not {l}.")


def _check_quadrature(result, what: str) -> None:
    failed = ~np.asarray(result.success)
    if np.any(failed):
        raise QuadratureFailure(
            f"The {what} missed its tolerance for {int(failed.sum())} argument(s) "
            f"(status {sorted(set(np.asarray(result.status)[failed].tolist()))}, "
            f"largest error estimate {float(np.max(np.asarray(result.error)[failed])):.3g})."
        )


def _t_limits(beta_tilde, nu: float, r_signed):
    scale = np.sqrt(nu) / np.sqrt((1.0 - r_signed) * (1.0 + r_signed))
    return -scale * r_signed, scale * (beta_tilde - r_signed)


def t_limits(beta_tilde, nu: float, r_signed):
    """Integration limits (t_minus, t_plus) of the inner integral.

    Raises:
        DomainError: For negative `beta_tilde`, nonpositive `nu` or |r_signed| >= 1.

    """
    shape, (beta_tilde, r_signed) = specfun.as_flat_arrays(beta_tilde, r_signed)
    if np.any(~(beta_tilde >= 0)):
        raise DomainError("t_limits requires beta_tilde >= 0.")
    if np.any(~(np.abs(r_signed) < 1)):
        raise DomainError("t_limits requires |r| < 1.")
    if not nu > 0:
        raise DomainError(f"t_limits requires nu > 0, not {nu}.")
    t_minus, t_plus = _t_limits(beta_tilde, nu, r_signed)
    return specfun.restore_shape(t_minus, shape), specfun.restore_shape(t_plus, shape)


def _f_stat(t, beta_tilde, nu: float, r_signed):
    """F argument of the inner integrand; +inf where the denominator vanishes
    or turns negative, i.e. at and beyond t_plus."""
    t_minus, t_plus = _t_limits(beta_tilde, nu, r_signed)
    span = t_plus - t_minus
    offset = t - t_minus
    denominator = (span - offset) * (span + offset)
    positive = denominator > 0
    safe = np.where(positive, denominator, 1.0)
    value = (nu - 1.0) / (nu + 1.0) * (nu + t * t) / safe
    return np.where(positive, value, np.inf)


def f_stat(t, beta_tilde, nu: float, r_signed):
    """The F statistic F(t, beta_tilde, nu, r) of the inner integrand.

    Raises:
        DomainError: If the denominator is not positive, i.e. `t` is not
            inside (t_minus, t_plus).

    """
    shape, (t, beta_tilde, r_signed) = specfun.as_flat_arrays(t, beta_tilde, r_signed)
    if np.any(~(beta_tilde >= 0)) or np.any(~(np.abs(r_signed) < 1)) or not nu > 1:
        raise DomainError("f_stat requires beta_tilde >= 0, |r| < 1 and nu > 1.")
    value = _f_stat(t, beta_tilde, nu, r_signed)
    if np.any(np.isinf(value)):
        raise DomainError("f_stat requires t inside (t_minus, t_plus).")
    return specfun.restore_shape(value, shape)


def _inner_integrand(phi, beta_tilde, r_signed, nu: float, tolerance: specfun.Tolerance):
    # t = tan(phi), dt = sec^2(phi) dphi
    t = np.tan(phi)
    probability = specfun.f_cdf(
        _f_stat(t, beta_tilde, nu, r_signed), nu + 1.0, nu - 1.0, tolerance
    )
    weight = np.exp(specfun.student_t_logpdf(t, nu) + np.log1p(t * t))
    return weight * probability


def inner_integral_I(beta_tilde, nu: float, r_signed, quad: QuadSettings | None = None):
    """The inner integral I(beta_tilde, nu, r) over t in (t_minus, t_plus).

    The integral is taken over φ = arctan t with a tanh-sinh rule, which
    never evaluates the integrand at the end points. Arguments above
    `BETA_TILDE_MAX` are evaluated at `BETA_TILDE_MAX`.

    Raises:
        DomainError: For negative `beta_tilde`, nu <= 1 or |r_signed| >= 1.
        QuadratureFailure: If the quadrature misses its tolerances.

    """
    quad = quad or DEFAULT_QUAD
    shape, (beta_tilde, r_signed) = specfun.as_flat_arrays(beta_tilde, r_signed)
    if not (nu > 1 and math.isfinite(nu)):
        raise DomainError(f"inner_integral_I requires nu > 1, not {nu}.")
    if np.any(~(beta_tilde >= 0)):
        raise DomainError("inner_integral_I requires beta_tilde >= 0.")
    if np.any(~(np.abs(r_signed) < 1)):
        raise DomainError("inner_integral_I requires |r| < 1.")

    beta_tilde = np.minimum(beta_tilde, BETA_TILDE_MAX)
    t_minus, t_plus = _t_limits(beta_tilde, nu, r_signed)
    lower, upper = np.arctan(t_minus), np.arctan(t_plus)

    values = np.zeros(beta_tilde.shape)
    # the integrand is below 1, so narrower ranges hold less than atol
    live = (upper - lower) > np.maximum(
        quad.atol, _MIN_PHI_ULPS * np.spacing(np.abs(upper) + 1.0)
    )
    if np.any(live):

        def integrand(phi, beta_tilde_, r_signed_):
            return _inner_integrand(phi, beta_tilde_, r_signed_, nu, quad.tolerance)

        result = tanhsinh(
            integrand,
            lower[live],
            upper[live],
            args=(beta_tilde[live], r_signed[live]),
            maxlevel=quad.max_level,
            atol=quad.atol,
            rtol=quad.rtol,
        )
        _check_quadrature(result, "inner integral")
        values[live] = result.integral

    return specfun.restore_shape(np.clip(values, 0.0, 1.0), shape)


def J(beta, nu: float, r: float, l: float = 1.0, quad: QuadSettings | None = None):  # noqa: E741
    """J(beta, nu, r, l) = I(|beta|/l, nu, r sgn beta) + I(l/|beta|, nu, r sgn beta).

    At beta = 0 the second term is evaluated at `BETA_TILDE_MAX`.

    """
    _check_model_parameters(nu, r, l)
    shape, (beta,) = specfun.as_flat_arrays(beta)
    if np.any(np.isnan(beta)):
        raise DomainError("J is undefined for NaN slopes.")

    beta_tilde = np.abs(beta) / l
    with np.errstate(divide="ignore"):
        reciprocal = np.where(beta_tilde > 0, 1.0 / beta_tilde, np.inf)
    r_signed = np.where(beta < 0, -r, r)

    both = inner_integral_I(
        np.concatenate([beta_tilde, reciprocal]),
        nu,
        np.concatenate([r_signed, r_signed]),
        quad,
    )
    both = np.atleast_1d(both)
    return specfun.restore_shape(both[: beta.size] + both[beta.size :], shape)


def cauchy_prior(beta_tilde):
    """Standard Cauchy density of the scale invariant slope."""
    beta_tilde = np.asarray(beta_tilde, dtype=float)
    values = 1.0 / (math.pi * (1.0 + beta_tilde * beta_tilde))
    return float(values) if values.ndim == 0 else values


def closed_form_density(beta_tilde, r: float, n: int):
    """Exact posterior density of the scale invariant slope for n = 4 and
    n = 6 pairs (nu = 3 and nu = 5).

    Raises:
        DomainError: If |r| >= 1 or `n` is not 4 or 6.

    """
    if not abs(r) < 1:
        raise DomainError(f"closed_form_density requires |r| < 1, not {r}.")
    b = np.asarray(beta_tilde, dtype=float)
    quadratic = b * b - 2.0 * r * b + 1.0
    if n == 4:
        shape = np.abs(b) / quadratic
        norm = 1.0 / specfun.gauss_2f1(1.0, 1.0, 1.5, r * r)
    elif n == 6:
        shape = np.abs(b) * (b * b - r * b + 1.0) / quadratic**2
        norm = 1.0 / specfun.gauss_2f1(2.0, 1.0, 1.5, r * r)
    else:
        raise DomainError(f"Closed forms exist for n = 4 and n = 6 only, not n = {n}.")
    values = norm * shape / (1.0 + b * b)
    return float(values) if values.ndim == 0 else values


class PosteriorModel:
    """Posterior of the slope for fixed `(nu, r, l)`.

    The normalization constant is computed at construction. The θ grid
    behind `cdf`, `quantile` and `shortest_interval` is built on first use
    and reused afterwards; the model is not meant to change once built.

    """

    def __init__(
        self,
        nu: float,
        r: float,
        l: float,  # noqa: E741
        quad: QuadSettings | None = None,
    ):
        _check_model_parameters(nu, r, l)
        self._nu = float(nu)
        self._r = float(r)
        self._l = float(l)
        self._quad = quad or DEFAULT_QUAD
        self._norm_const = self._normalization()
        if not self._norm_const > 0:
            raise QuadratureFailure(
                f"Non-positive normalization {self._norm_const} for "
                f"nu={self._nu}, r={self._r}."
            )

    @property
    def nu(self) -> float:
        return self._nu

    @property
    def r(self) -> float:
        return self._r

    @property
    def l(self) -> float:  # noqa: E743
        return self._l

    @property
    def quad(self) -> QuadSettings:
        return self._quad

    @property
    def norm_const(self) -> float:
        """∫ J(tan θ) dθ / π over (-π/2, π/2)."""
        return self._norm_const

    def __repr__(self) -> str:
        return (
            f"PosteriorModel(nu={self.nu}, r={self.r}, l={self.l}, "
            f"norm_const={self.norm_const:.12g})"
        )

    def _normalization(self) -> float:
        # θ = 0, where |beta_tilde| has a cusp, is always a piece boundary
        def integrand(theta):
            return J(np.tan(theta), self.nu, self.r, 1.0, self.quad) / math.pi

        edges = np.linspace(-_HALF_PI, _HALF_PI, NORMALIZATION_PIECES + 1)
        lower, upper = edges[:-1], edges[1:]
        total = 0.0
        for _ in range(NORMALIZATION_SPLITS + 1):
            result = tanhsinh(
                integrand,
                lower,
                upper,
                maxlevel=self.quad.max_level,
                atol=self.quad.atol,
                rtol=self.quad.rtol,
            )
            failed = ~np.asarray(result.success)
            total += float(np.sum(np.asarray(result.integral)[~failed]))
            if not np.any(failed):
                return total
            LOGGER.debug(
                f"Halving {int(failed.sum())} normalization piece(s) for "
                f"nu={self.nu}, r={self.r}"
            )
            middle = 0.5 * (lower[failed] + upper[failed])
            lower = np.concatenate([lower[failed], middle])
            upper = np.concatenate([middle, upper[failed]])

        _check_quadrature(result, "normalization integral")
        return total

    def theta_density(self, theta):
        """Posterior density of θ = arctan(beta / l) on (-π/2, π/2)."""
        values = J(np.tan(theta), self.nu, self.r, 1.0, self.quad)
        return values / (math.pi * self.norm_const)

    def density(self, beta):
        """Posterior density p(beta | y) of the slope."""
        beta_tilde = np.asarray(beta, dtype=float) / self.l
        values = (
            cauchy_prior(beta_tilde)
            * J(beta_tilde, self.nu, self.r, 1.0, self.quad)
            / (self.norm_const * self.l)
        )
        return values

    @cached_property
    def _grid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """θ nodes, normalized θ density and CDF at the nodes."""
        size = self.quad.grid_points
        half = (size - 1) // 2
        theta = np.linspace(-_HALF_PI, _HALF_PI, size)
        single = np.atleast_1d(
            inner_integral_I(
                np.abs(np.tan(theta)),
                self.nu,
                np.where(theta < 0, -self.r, self.r),
                self.quad,
            )
        )
        # J(tan θ) = I(|tan θ|) + I(|cot θ|), and the cotangent term is the
        # single integral at the mirror node ±π/2 - θ of the same half
        index = np.arange(size)
        mirror = np.where(index >= half, size - 1 + half - index, half - index)
        weight = (single + single[mirror]) / (math.pi * self.norm_const)
        cumulative = cumulative_trapezoid(weight, theta, initial=0.0)
        total = cumulative[-1]
        LOGGER.debug(
            f"θ grid of {theta.size} nodes holds mass {total:.10f} for {self!r}"
        )
        weight = weight / total
        cumulative = np.maximum.accumulate(cumulative / total)
        cumulative[-1] = 1.0
        return theta, weight, cumulative

    def _cell_cdf(self, index, theta):
        # exact integral of the linear interpolant of the density within a cell
        nodes, weight, cumulative = self._grid
        left = nodes[index]
        step = nodes[index + 1] - left
        s = theta - left
        slope = (weight[index + 1] - weight[index]) / step
        return cumulative[index] + weight[index] * s + 0.5 * slope * s * s

    def cdf(self, beta):
        """Posterior probability that the slope is at most `beta`."""
        nodes = self._grid[0]
        shape, (beta,) = specfun.as_flat_arrays(beta)
        if np.any(np.isnan(beta)):
            raise DomainError("The CDF is undefined for NaN slopes.")
        theta = np.arctan(beta / self.l)
        index = np.clip(np.searchsorted(nodes, theta, side="right") - 1, 0, nodes.size - 2)
        values = np.clip(self._cell_cdf(index, theta), 0.0, 1.0)
        return specfun.restore_shape(values, shape)

    def probability_between(self, lower: float, upper: float) -> float:
        """Posterior mass of the slope in [lower, upper]."""
        if lower > upper:
            raise DomainError(f"Empty range [{lower}, {upper}].")
        return float(self.cdf(upper) - self.cdf(lower))

    def _theta_quantile(self, p: float) -> float:
        nodes, _, cumulative = self._grid
        index = int(np.clip(np.searchsorted(cumulative, p, side="left") - 1, 0, nodes.size - 2))
        left, right = float(nodes[index]), float(nodes[index + 1])

        def excess(theta: float) -> float:
            return float(self._cell_cdf(index, theta)) - p

        if excess(left) >= -CDF_ATOL:
            return left
        if excess(right) <= CDF_ATOL:
            return right
        return bisect(excess, left, right, xtol=QUANTILE_XTOL)

    def quantile(self, p):
        """Slope below which the posterior mass is `p`.

        Raises:
            DomainError: If `p` is not in (0, 1).

        """
        shape, (p,) = specfun.as_flat_arrays(p)
        if np.any(~((p > 0) & (p < 1))):
            raise DomainError("Quantiles are defined for probabilities in (0, 1).")
        theta = np.array([self._theta_quantile(float(value)) for value in p])
        return specfun.restore_shape(self.l * np.tan(theta), shape)

    def median(self) -> float:
        return self.quantile(0.5)

    def _interval_width(self, start: float, level: float) -> float:
        return self.quantile(start + level) - self.quantile(start)

    def shortest_interval(self, level: float = 0.95) -> IntervalEstimate:
        """Shortest interval [quantile(a), quantile(a + level)].

        The width is scanned over a in (0, 1 - level); when the scan is
        unimodal with an interior minimum, the minimum is refined by
        golden-section search, otherwise the shortest scanned interval is
        returned and flagged with `unimodal=False`.

        Raises:
            DomainError: If `level` is not in (0, 1).

        """
        if not 0 < level < 1:
            raise DomainError(f"level must lie in (0, 1), not {level}.")

        starts = np.linspace(0.0, 1.0 - level, INTERVAL_SCAN_POINTS + 2)[1:-1]
        widths = np.array([self._interval_width(a, level) for a in starts])
        best = int(np.argmin(widths))
        start = float(starts[best])
        unimodal = _is_unimodal(widths)

        if unimodal and 0 < best < starts.size - 1:
            try:
                result = minimize_scalar(
                    self._interval_width,
                    bracket=(starts[best - 1], start, starts[best + 1]),
                    args=(level,),
                    method="golden",
                    options={"xtol": 1e-8},
                )
            except ValueError as exc:
                LOGGER.debug(f"Golden-section refinement skipped: {exc}")
            else:
                if result.fun <= widths[best] and starts[0] <= result.x <= starts[-1]:
                    start = float(result.x)
        elif not unimodal:
            LOGGER.info(
                f"Interval width is not unimodal for {self!r} at level {level}; "
                "returning the shortest scanned interval."
            )

        return IntervalEstimate(
            lower=self.quantile(start),
            upper=self.quantile(start + level),
            level=level,
            median=self.median(),
            unimodal=unimodal,
            start_probability=start,
        )

    def density_grid(self, spec: GridSpec | None = None) -> pandas.DataFrame:
        """Tabulates the posterior with columns beta, theta, density,
        theta_density and cdf, ordered by beta."""
        spec = spec or GridSpec()
        if spec.scale == "theta":
            theta = np.linspace(-_HALF_PI + spec.edge, _HALF_PI - spec.edge, spec.points)
            beta = self.l * np.tan(theta)
        else:
            beta = np.linspace(spec.beta_min, spec.beta_max, spec.points)
            theta = np.arctan(beta / self.l)

        theta_density = np.asarray(self.theta_density(theta), dtype=float)
        beta_tilde = beta / self.l
        return pandas.DataFrame(
            {
                "beta": beta,
                "theta": theta,
                "density": theta_density / (self.l * (1.0 + beta_tilde * beta_tilde)),
                "theta_density": theta_density,
                "cdf": self.cdf(beta),
            }
        )


def _is_unimodal(values: np.ndarray, rel_tol: float = UNIMODAL_RTOL) -> bool:
    """True if `values` falls and then rises, ignoring changes below
    `rel_tol` of its largest magnitude."""
    steps = np.diff(values)
    slack = rel_tol * float(np.max(np.abs(values)))
    rising = np.flatnonzero(steps > slack)
    if rising.size == 0:
        return True
    return not np.any(steps[rising[0] :] < -slack)


def build_model(
    source: SufficientStats | tuple[float, float, float],
    quad: QuadSettings | None = None,
) -> PosteriorModel:
    """Builds the slope posterior from sufficient statistics or from
    `(nu, r, l)` chosen directly, e.g. to use it as a prior."""
    if isinstance(source, SufficientStats):
        nu, r, l = source.nu, source.r, source.l  # noqa: E741
    else:
        nu, r, l = source  # noqa: E741
    model = PosteriorModel(nu, r, l, quad)
    LOGGER.debug(f"Built {model!r}")
    return model
