"""Special functions used by the slope posterior: log-gamma, the regularized
incomplete beta function, the Student t density, the F distribution function
and the Gauss hypergeometric series.

Apart from `gauss_2f1`, the kernels accept numpy arrays (with broadcasting)
as well as plain numbers, and return a float for scalar input.

"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from eivslope.exceptions import DomainError, NonConvergence


class Tolerance(BaseModel):
    """Stopping rule shared by the series and continued-fraction kernels."""

    rel_eps: float = Field(
        1e-12, gt=0, description="Relative change below which iteration stops."
    )
    abs_eps: float = Field(
        1e-15, ge=0, description="Absolute size below which a series term is ignored."
    )
    max_iter: int = Field(
        500,
        ge=1,
        description="Iteration cap; reaching it raises `NonConvergence`.",
    )
    model_config = ConfigDict(extra="forbid", frozen=True)


DEFAULT_TOLERANCE = Tolerance()

# the hypergeometric series converges like k^(a+b-c-1) z^k
SERIES_TOLERANCE = Tolerance(max_iter=20_000)

# beta arguments at or above this map to an F probability of exactly 1
F_CDF_SATURATION = 1.0 - 1e-16

_FPMIN = 1e-300
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation with g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def as_flat_arrays(*values) -> tuple[tuple[int, ...], list[np.ndarray]]:
    """Broadcast the inputs together and return the common shape along with
    flat, writable float copies of each input."""
    arrays = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in values))
    return arrays[0].shape, [np.array(a, dtype=float).ravel() for a in arrays]


def restore_shape(values: np.ndarray, shape: tuple[int, ...]):
    values = values.reshape(shape)
    if shape == ():
        return float(values)
    return values


def ln_gamma(x):
    """Natural logarithm of the gamma function for x > 0.

    Raises:
        DomainError: If any `x` is not strictly positive.

    """
    shape, (x,) = as_flat_arrays(x)
    if np.any(~(x > 0)):
        raise DomainError("ln_gamma is only defined for x > 0.")

    # Gamma(x) = Gamma(x + 1) / x keeps the approximation on x >= 0.5
    small = x < 0.5
    z = np.where(small, x, x - 1.0)
    series = np.full_like(z, _LANCZOS_COEFFICIENTS[0])
    for i, coefficient in enumerate(_LANCZOS_COEFFICIENTS[1:], start=1):
        series += coefficient / (z + i)
    t = z + _LANCZOS_G + 0.5
    result = _HALF_LOG_TWO_PI + (z + 0.5) * np.log(t) - t + np.log(series)
    result = np.where(small, result - np.log(x), result)
    return restore_shape(result, shape)


def ln_beta(a, b):
    """Natural logarithm of the beta function B(a, b)."""
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(np.add(a, b))


def _floor_magnitude(values: np.ndarray) -> np.ndarray:
    return np.where(np.abs(values) < _FPMIN, _FPMIN, values)


def _beta_continued_fraction(
    a: np.ndarray, b: np.ndarray, x: np.ndarray, tolerance: Tolerance
) -> np.ndarray:
    """Modified Lentz evaluation of the continued fraction for I_x(a, b).

    Only the elements that have not yet converged are iterated.

    Raises:
        NonConvergence: If some element is still changing after
            `tolerance.max_iter` iterations.

    """
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 / _floor_magnitude(1.0 - qab * x / qap)
    h = d.copy()

    active = np.arange(x.size)
    for m in range(1, tolerance.max_iter + 1):
        a_m, b_m, x_m = a[active], b[active], x[active]
        c_m, d_m = c[active], d[active]
        m2 = 2 * m

        numerator = m * (b_m - m) * x_m / ((qam[active] + m2) * (a_m + m2))
        d_m = 1.0 / _floor_magnitude(1.0 + numerator * d_m)
        c_m = _floor_magnitude(1.0 + numerator / c_m)
        even = d_m * c_m

        numerator = (
            -(a_m + m) * (qab[active] + m) * x_m / ((a_m + m2) * (qap[active] + m2))
        )
        d_m = 1.0 / _floor_magnitude(1.0 + numerator * d_m)
        c_m = _floor_magnitude(1.0 + numerator / c_m)
        odd = d_m * c_m

        h[active] *= even * odd
        c[active] = c_m
        d[active] = d_m
        active = active[np.abs(odd - 1.0) > tolerance.rel_eps]
        if active.size == 0:
            return h

    raise NonConvergence(
        f"Incomplete beta continued fraction did not converge in {tolerance.max_iter} "
        f"iterations for {active.size} argument(s), e.g. a={a[active[0]]}, "
        f"b={b[active[0]]}, x={x[active[0]]}."
    )


def reg_inc_beta(z, a, b, tolerance: Tolerance = DEFAULT_TOLERANCE):
    """Regularized incomplete beta function I_z(a, b).

    Uses the continued fraction directly for z < (a + 1) / (a + b + 2) and
    the symmetry I_z(a, b) = 1 - I_{1-z}(b, a) otherwise.

    Parameters:
        z: Evaluation point(s) in [0, 1].
        a, b: Positive shape parameters.
        tolerance: Stopping rule of the continued fraction.

    Raises:
        DomainError: If any argument lies outside its domain.
        NonConvergence: If the continued fraction hits `tolerance.max_iter`.

    """
    shape, (z, a, b) = as_flat_arrays(z, a, b)
    if np.any(~((z >= 0.0) & (z <= 1.0))):
        raise DomainError("reg_inc_beta requires 0 <= z <= 1.")
    if np.any(~(a > 0.0)) or np.any(~(b > 0.0)):
        raise DomainError("reg_inc_beta requires a > 0 and b > 0.")

    result = np.where(z >= 1.0, 1.0, 0.0)
    interior = (z > 0.0) & (z < 1.0)
    if np.any(interior):
        zi, ai, bi = z[interior], a[interior], b[interior]
        swap = zi >= (ai + 1.0) / (ai + bi + 2.0)
        aa = np.where(swap, bi, ai)
        bb = np.where(swap, ai, bi)
        xx = np.where(swap, 1.0 - zi, zi)
        log_front = aa * np.log(xx) + bb * np.log1p(-xx) - ln_beta(aa, bb)
        value = np.exp(log_front) * _beta_continued_fraction(aa, bb, xx, tolerance) / aa
        result[interior] = np.where(swap, 1.0 - value, value)

    return restore_shape(np.clip(result, 0.0, 1.0), shape)


def student_t_logpdf(t, nu):
    """Logarithm of the Student t density with `nu` degrees of freedom."""
    shape, (t, nu) = as_flat_arrays(t, nu)
    if np.any(~(nu > 0.0)):
        raise DomainError("The Student t density requires nu > 0.")
    half = 0.5 * (nu + 1.0)
    log_norm = ln_gamma(half) - ln_gamma(0.5 * nu) - 0.5 * np.log(nu * np.pi)
    return restore_shape(log_norm - half * np.log1p(t * t / nu), shape)


def student_t_pdf(t, nu):
    """Student t density with `nu` degrees of freedom."""
    return np.exp(student_t_logpdf(t, nu))


def f_cdf(x, nu1, nu2, tolerance: Tolerance = DEFAULT_TOLERANCE):
    """Cumulative distribution function of the F distribution,
    I_{nu1 x / (nu1 x + nu2)}(nu1 / 2, nu2 / 2).

    Infinite `x`, and any `x` whose beta argument reaches `F_CDF_SATURATION`,
    give exactly 1.

    Raises:
        DomainError: For negative (or NaN) `x` or nonpositive degrees of freedom.

    """
    shape, (x, nu1, nu2) = as_flat_arrays(x, nu1, nu2)
    if np.any(np.isnan(x) | (x < 0.0)):
        raise DomainError("f_cdf requires x >= 0.")
    if np.any(~(nu1 > 0.0)) or np.any(~(nu2 > 0.0)):
        raise DomainError("f_cdf requires positive degrees of freedom.")

    with np.errstate(over="ignore", invalid="ignore"):
        scaled = nu1 * x
        z = np.where(np.isinf(scaled), 1.0, scaled / (scaled + nu2))

    result = np.ones_like(z)
    below = z < F_CDF_SATURATION
    if np.any(below):
        result[below] = reg_inc_beta(
            z[below], 0.5 * nu1[below], 0.5 * nu2[below], tolerance
        )
    return restore_shape(result, shape)


def gauss_2f1(
    a: float, b: float, c: float, z: float, tolerance: Tolerance = SERIES_TOLERANCE
) -> float:
    """Gauss hypergeometric function F(a, b; c; z) by its power series,
    for 0 <= z < 1.

    Raises:
        DomainError: If c <= 0 or z is outside [0, 1).
        NonConvergence: If the series needs more than `tolerance.max_iter` terms.

    """
    if not c > 0:
        raise DomainError(f"gauss_2f1 requires c > 0, not {c}.")
    if not 0.0 <= z < 1.0:
        raise DomainError(f"gauss_2f1 requires 0 <= z < 1, not {z}.")

    total = term = 1.0
    for k in range(tolerance.max_iter):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        # bound on the remaining tail for term ratios below z
        if abs(term) <= (tolerance.abs_eps + tolerance.rel_eps * abs(total)) * (1.0 - z):
            return total

    raise NonConvergence(
        f"Hypergeometric series F({a}, {b}; {c}; {z}) did not converge in "
        f"{tolerance.max_iter} terms."
    )
