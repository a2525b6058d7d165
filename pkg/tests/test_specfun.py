import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special
import scipy.stats

from eivslope.exceptions import DomainError, NonConvergence
from eivslope.specfun import (
    F_CDF_SATURATION,
    Tolerance,
    f_cdf,
    gauss_2f1,
    ln_beta,
    ln_gamma,
    reg_inc_beta,
    student_t_logpdf,
    student_t_pdf,
)


@pytest.mark.parametrize("x", [1e-8, 0.1, 0.5, 1.0, 2.0, 3.5, 10.0, 171.3, 1e5])
def test_ln_gamma_matches_scipy(x):
    assert ln_gamma(x) == pytest.approx(scipy.special.gammaln(x), rel=1e-12, abs=1e-13)


def test_ln_gamma_exact_values():
    assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
    assert ln_gamma(2.0) == pytest.approx(0.0, abs=1e-13)
    assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)


def test_ln_gamma_vectorized():
    x = np.linspace(0.05, 30.0, 50).reshape(5, 10)
    values = ln_gamma(x)
    assert values.shape == (5, 10)
    np.testing.assert_allclose(values, scipy.special.gammaln(x), rtol=1e-12, atol=1e-13)
    assert isinstance(ln_gamma(3.0), float)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


def test_ln_beta():
    assert ln_beta(2.0, 3.0) == pytest.approx(math.log(1 / 12), rel=1e-13)
    np.testing.assert_allclose(
        ln_beta(np.array([0.5, 7.0]), 2.5), scipy.special.betaln([0.5, 7.0], 2.5)
    )


@pytest.mark.parametrize(
    "z,a,b",
    [
        (0.3, 2.0, 3.0),
        (0.9, 0.5, 0.5),
        (0.01, 10.0, 1.5),
        (0.5, 50.0, 49.0),
        (0.999, 3.0, 200.0),
        (0.2, 1e-3, 4.0),
        (0.7, 250.0, 260.0),
    ],
)
def test_reg_inc_beta_matches_scipy(z, a, b):
    assert reg_inc_beta(z, a, b) == pytest.approx(
        scipy.special.betainc(a, b, z), rel=1e-10, abs=1e-14
    )


def test_reg_inc_beta_identities():
    assert reg_inc_beta(0.0, 2.0, 5.0) == 0.0
    assert reg_inc_beta(1.0, 2.0, 5.0) == 1.0
    assert reg_inc_beta(0.5, 2.0, 2.0) == pytest.approx(0.5, abs=1e-13)
    z = np.linspace(0.01, 0.99, 40)
    np.testing.assert_allclose(
        reg_inc_beta(z, 2.5, 4.0) + reg_inc_beta(1 - z, 4.0, 2.5), 1.0, atol=1e-13
    )


def test_reg_inc_beta_broadcasts():
    z = np.linspace(0.05, 0.95, 7)[:, None]
    a = np.array([0.5, 3.0, 12.0])
    values = reg_inc_beta(z, a, 2.0)
    assert values.shape == (7, 3)
    np.testing.assert_allclose(values, scipy.special.betainc(a, 2.0, z), rtol=1e-10)
    assert np.all(np.diff(values, axis=0) > 0)


@pytest.mark.parametrize("z,a,b", [(-0.1, 1.0, 1.0), (1.1, 1.0, 1.0), (0.5, 0.0, 1.0), (0.5, 1.0, -2.0)])
def test_reg_inc_beta_domain(z, a, b):
    with pytest.raises(DomainError):
        reg_inc_beta(z, a, b)


def test_reg_inc_beta_iteration_cap():
    with pytest.raises(NonConvergence):
        reg_inc_beta(0.5, 500.0, 500.0, Tolerance(max_iter=2))


@pytest.mark.parametrize("nu", [1.0, 2.5, 19.0, 500.0])
def test_student_t_matches_scipy(nu):
    t = np.linspace(-40.0, 40.0, 81)
    np.testing.assert_allclose(
        student_t_logpdf(t, nu), scipy.stats.t.logpdf(t, nu), rtol=1e-10, atol=1e-11
    )
    np.testing.assert_allclose(student_t_pdf(t, nu), scipy.stats.t.pdf(t, nu), rtol=1e-10)


def test_student_t_cauchy_case():
    assert student_t_pdf(0.0, 1.0) == pytest.approx(1 / math.pi, rel=1e-13)


def test_student_t_domain():
    with pytest.raises(DomainError):
        student_t_pdf(0.0, 0.0)


@pytest.mark.parametrize("nu1,nu2", [(2.0, 2.0), (20.0, 18.0), (4.0, 2.0), (101.0, 99.0)])
def test_f_cdf_matches_scipy(nu1, nu2):
    x = np.array([0.0, 1e-6, 0.1, 0.7, 1.0, 2.5, 30.0, 1e4])
    np.testing.assert_allclose(
        f_cdf(x, nu1, nu2), scipy.stats.f.cdf(x, nu1, nu2), rtol=1e-10, atol=1e-14
    )


def test_f_cdf_limits():
    assert f_cdf(0.0, 3.0, 5.0) == 0.0
    assert f_cdf(math.inf, 3.0, 5.0) == 1.0
    # beta argument beyond the saturation threshold
    huge = 1e20
    assert 3.0 * huge / (3.0 * huge + 5.0) >= F_CDF_SATURATION
    assert f_cdf(huge, 3.0, 5.0) == 1.0


@pytest.mark.parametrize("x", [-1.0, float("nan")])
def test_f_cdf_domain(x):
    with pytest.raises(DomainError):
        f_cdf(x, 3.0, 5.0)


@pytest.mark.parametrize("z", [0.0, 0.1, 0.5, 0.81, 0.99])
@pytest.mark.parametrize("a,b,c", [(1.0, 1.0, 1.5), (2.0, 1.0, 1.5), (0.5, 2.5, 3.0)])
def test_gauss_2f1_matches_scipy(a, b, c, z):
    assert gauss_2f1(a, b, c, z) == pytest.approx(scipy.special.hyp2f1(a, b, c, z), rel=1e-10)


def test_gauss_2f1_closed_form():
    # F(1, 1; 3/2; r^2) = arcsin(r) / (r sqrt(1 - r^2))
    r = 0.6
    assert gauss_2f1(1.0, 1.0, 1.5, r * r) == pytest.approx(
        math.asin(r) / (r * math.sqrt(1 - r * r)), rel=1e-12
    )
    assert gauss_2f1(-2.0, 1.0, 1.0, 0.5) == pytest.approx(0.25)


@pytest.mark.parametrize("c,z", [(0.0, 0.5), (1.0, 1.0), (1.0, -0.1)])
def test_gauss_2f1_domain(c, z):
    with pytest.raises(DomainError):
        gauss_2f1(1.0, 1.0, c, z)


def test_gauss_2f1_iteration_cap():
    with pytest.raises(NonConvergence):
        gauss_2f1(1.0, 1.0, 1.5, 0.99, Tolerance(max_iter=10))


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel_eps=0.0)
    with pytest.raises(ValueError):
        Tolerance(max_iter=0)


def test_reg_inc_beta_symmetry_on_random_grid():
    rng = np.random.default_rng(2024)
    z = rng.uniform(0.0, 1.0, size=400)
    a = rng.uniform(0.05, 60.0, size=400)
    b = rng.uniform(0.05, 60.0, size=400)
    np.testing.assert_allclose(reg_inc_beta(z, a, b) + reg_inc_beta(1.0 - z, b, a), 1.0, atol=1e-12)


@pytest.mark.parametrize("nu", [2.0, 3.0, 19.0, 39.0])
def test_student_t_pdf_mass(nu):
    mass, _ = scipy.integrate.quad(
        student_t_pdf, -50.0, 50.0, args=(nu,), epsabs=1e-13, epsrel=1e-12, limit=200
    )
    # the heavy tails of small nu hold mass outside [-50, 50]
    tails = 2.0 * scipy.stats.t.sf(50.0, nu)
    assert mass + tails == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("nu1,nu2", [(20.0, 18.0), (4.0, 2.0), (1000.0, 998.0)])
def test_f_cdf_is_nondecreasing(nu1, nu2):
    x = np.concatenate([[0.0], np.geomspace(1e-8, 1e12, 2000), [np.inf]])
    values = f_cdf(x, nu1, nu2)
    assert np.all(np.diff(values) >= 0)
    assert values[0] == 0.0
    assert values[-1] == 1.0


@pytest.mark.parametrize("r", np.round(np.arange(0.1, 1.0, 0.1), 1).tolist())
def test_gauss_2f1_arcsin_identity(r):
    value = gauss_2f1(1.0, 1.0, 1.5, r * r)
    assert value * r * math.sqrt(1 - r * r) / math.asin(r) == pytest.approx(1.0, abs=1e-10)
