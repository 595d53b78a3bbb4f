# -*- coding: utf-8 -*-
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate as sci
from scipy import special as sp

from utils.statespace.errors import DomainError
from utils.statespace.models import ScalarField
from utils.statespace.special import (
    ExactVolume, beta_g, beta_segment, ellipsoid_integral, exact_beta_g, exact_gamma, exact_simplex_moment,
    exact_sphere_surface, gamma, gamma_half_integer, log_gamma, simplex_moment, sphere_surface,
)


def test_gamma_known_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma(5) == 24.0
    assert exact_gamma(Fraction(7, 2)) == ExactVolume(Fraction(15, 8), Fraction(1, 2))
    assert gamma_half_integer(10) == ExactVolume(24)


@pytest.mark.parametrize("z", [0.3, 1.7, 2.25, 9.9, 40.1])
def test_gamma_generic_arguments(z):
    assert gamma(z) == pytest.approx(sp.gamma(z), rel=1e-13)
    assert log_gamma(z) == pytest.approx(sp.gammaln(z), rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("z", [0, -1.5])
def test_gamma_rejects_nonpositive(z):
    with pytest.raises(DomainError):
        gamma(z)
    with pytest.raises(DomainError):
        log_gamma(z)


def test_sphere_surfaces():
    assert sphere_surface(1) == 2.0
    assert sphere_surface(2) == pytest.approx(2 * math.pi)
    assert sphere_surface(4) == pytest.approx(2 * math.pi ** 2)
    assert exact_sphere_surface(3) == ExactVolume(4, 1)
    with pytest.raises(DomainError):
        sphere_surface(0)


def test_beta_g_examples():
    assert beta_g(2, 0) == pytest.approx(1 / 3, rel=1e-15)
    assert beta_g(0, 1) == pytest.approx(2 / 3, rel=1e-15)
    assert exact_beta_g(1, Fraction(1, 2)) == ExactVolume(Fraction(1, 3))


@pytest.mark.parametrize("a", np.arange(0.0, 5.5, 0.5))
@pytest.mark.parametrize("b", np.arange(0.0, 5.5, 0.5))
def test_beta_g_gamma_identity(a, b):
    lhs = beta_g(a, b) * 2 * sp.gamma(a / 2 + b + 1.5)
    assert lhs == pytest.approx(sp.gamma(b + 1) * sp.gamma((a + 1) / 2), rel=1e-13)


@pytest.mark.parametrize("a, b", [(0, 0.5), (3, 1.5), (1.5, 2.0), (4, 0.25)])
def test_beta_g_against_quadrature(a, b):
    direct, _ = sci.quad(lambda x: x ** a * (1 - x * x) ** b, 0, 1, epsabs=0, epsrel=1e-12)
    assert beta_g(a, b) == pytest.approx(direct, rel=1e-8)


def test_simplex_moment_examples():
    assert simplex_moment(2, 1) == pytest.approx(1 / 6, rel=1e-15)
    assert simplex_moment(3, 0) == pytest.approx(0.5, rel=1e-15)
    assert simplex_moment(4, 1.5) == pytest.approx(sp.gamma(2.5) ** 4 / sp.gamma(10), rel=1e-13)
    assert exact_simplex_moment(4, Fraction(3, 2)) == exact_gamma(Fraction(5, 2)) ** 4 / exact_gamma(10)


@pytest.mark.parametrize("n, k", [(2, 0.5), (3, 1), (4, 2), (3, 1.3)])
def test_simplex_moment_monte_carlo(rng, n, k):
    points = rng.dirichlet(np.ones(n), size=200_000)
    values = np.prod(points, axis=1) ** k / math.factorial(n - 1)
    se = values.std(ddof=1) / math.sqrt(values.size)
    assert abs(values.mean() - simplex_moment(n, k)) <= 3 * se


def test_simplex_moment_rejects_bad_arguments():
    with pytest.raises(DomainError):
        simplex_moment(1, 1)
    with pytest.raises(DomainError):
        exact_simplex_moment(3, 0.3)


def test_ellipsoid_examples():
    assert ellipsoid_integral(ScalarField.real, 2, 1.0, 1.0, 0) == pytest.approx(math.pi, rel=1e-14)
    ab = 0.3 * 0.5
    assert ellipsoid_integral(ScalarField.real, 1, 1.0, ab, 0.5) == pytest.approx(math.pi * ab / 2, rel=1e-14)
    assert ellipsoid_integral(ScalarField.complex, 2, 1.0, 1.0, 0) == pytest.approx(math.pi, rel=1e-14)


def _ellipsoid_oracle(m: int, det_t: float, rho: float, k: float) -> float:
    # radial form after whitening x -> T^(1/2) x
    radial, _ = sci.quad(lambda r: r ** (m - 1) * (rho - r * r) ** k, 0, math.sqrt(rho), epsabs=0, epsrel=1e-12)
    return sphere_surface(m) * radial / math.sqrt(det_t)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("k", [0, 0.5, 1, 1.5])
def test_ellipsoid_against_quadrature(m, k):
    assert ellipsoid_integral(ScalarField.real, m, 2.5, 0.7, k) == pytest.approx(
        _ellipsoid_oracle(m, 2.5, 0.7, k), rel=1e-8)


def test_ellipsoid_complex_uses_real_determinant():
    # one complex coordinate with T = t: the real representation is diag(t, t)
    t = 1.6
    assert ellipsoid_integral(ScalarField.complex, 2, t, 0.4, 1) == pytest.approx(
        _ellipsoid_oracle(2, t * t, 0.4, 1), rel=1e-8)


def test_ellipsoid_rejects_bad_dimension():
    with pytest.raises(DomainError):
        ellipsoid_integral(ScalarField.quaternion, 6, 1.0, 1.0, 0)
    with pytest.raises(DomainError):
        ellipsoid_integral(ScalarField.real, 2, -1.0, 1.0, 0)


def test_beta_segment():
    direct, _ = sci.quad(lambda x: x ** 1.5 * (0.8 - x) ** 2, 0, 0.8, epsabs=0, epsrel=1e-12)
    assert beta_segment(1.5, 2, 0.8) == pytest.approx(direct, rel=1e-10)


def test_exact_volume_rendering():
    assert ExactVolume(Fraction(1, 240), 2).to_text() == "pi^2/240"
    assert ExactVolume(Fraction(1, 4), 1).to_text() == "pi/4"
    assert ExactVolume(Fraction(15, 8), Fraction(1, 2)).to_text() == "15*sqrt(pi)/8"
    assert ExactVolume(Fraction(3, 5)).to_text() == "3/5"
    assert ExactVolume(Fraction(1, 240), 2).decimal(6) == "0.0411234"
    assert ExactVolume(7, 3).value() == pytest.approx(7 * math.pi ** 3, rel=1e-12)


def test_exact_volume_rejects_quarter_powers():
    with pytest.raises(DomainError):
        ExactVolume(1, Fraction(1, 4))
