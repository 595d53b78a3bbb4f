# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from utils.statespace.errors import DomainError
from utils.statespace.models import ScalarField
from utils.statespace.special import (
    ExactVolume, Number, beta_g, exact_beta_g, exact_gamma, exact_simplex_moment, exact_sphere_surface,
    half_integer, log_gamma, simplex_moment, sphere_surface,
)

EXACT_MAX_N = 20


def _check_n(n: int, minimum: int = 1):
    if not isinstance(n, int) or n < minimum:
        raise DomainError(f"matrix order must be an integer >= {minimum}, got {n!r}")


def _real_volume(n: int) -> ExactVolume:
    if n % 2 == 0:
        k = n // 2
        coeff = Fraction(math.factorial(2 * k), 2 ** (k * k + k) * math.factorial(k) * math.factorial(2 * k * k + k - 1))
        pi_pow = k * k
    else:
        k = (n - 1) // 2
        coeff = Fraction(math.factorial(2 * k), 2 ** (k * k + k) * math.factorial(k - 1) * math.factorial(2 * k * k + 3 * k))
        pi_pow = k * k + k
    for i in range(1, k):
        coeff *= math.factorial(2 * i)
    return ExactVolume(coeff, pi_pow)


def _complex_volume(n: int) -> ExactVolume:
    coeff = Fraction(1, math.factorial(n * n - 1))
    for i in range(1, n):
        coeff *= math.factorial(i)
    return ExactVolume(coeff, n * (n - 1) // 2)


def _quaternion_volume(n: int) -> ExactVolume:
    coeff = Fraction(math.factorial(2 * n - 2), math.factorial(2 * n * n - n - 1))
    for i in range(1, n - 1):
        coeff *= math.factorial(2 * i)
    return ExactVolume(coeff, n * n - n)


_VOLUME_FORMULAS = {
    ScalarField.real: _real_volume,
    ScalarField.complex: _complex_volume,
    ScalarField.quaternion: _quaternion_volume,
}


def volume_lebesgue(field: ScalarField, n: int) -> ExactVolume:
    """Lebesgue volume of the n x n state space over the field (n = 1 is the single point state)."""
    field = ScalarField.parse(field)
    _check_n(n)
    if n == 1:
        return ExactVolume(1)
    return _VOLUME_FORMULAS[field](n)


def log_volume_lebesgue(field: ScalarField, n: int) -> float:
    field = ScalarField.parse(field)
    _check_n(n)
    if n <= EXACT_MAX_N:
        return volume_lebesgue(field, n).log_value()

    lgf = lambda m: log_gamma(m + 1)
    log_pi = math.log(math.pi)

    if field is ScalarField.real:
        if n % 2 == 0:
            k = n // 2
            total = k * k * log_pi - (k * k + k) * math.log(2) + lgf(2 * k) - lgf(k) - lgf(2 * k * k + k - 1)
        else:
            k = (n - 1) // 2
            total = (k * k + k) * (log_pi - math.log(2)) + lgf(2 * k) - lgf(k - 1) - lgf(2 * k * k + 3 * k)
        return total + sum(lgf(2 * i) for i in range(1, k))

    if field is ScalarField.complex:
        return n * (n - 1) / 2 * log_pi - lgf(n * n - 1) + sum(lgf(i) for i in range(1, n))

    return lgf(2 * n - 2) + (n * n - n) * log_pi - lgf(2 * n * n - n - 1) + sum(lgf(2 * i) for i in range(1, n - 1))


def _det_alpha_arguments(field: ScalarField, n: int, alpha) -> Tuple[List, List]:
    """Gamma arguments (numerator, denominator) of the det^alpha expectation."""
    if field is ScalarField.real:
        num = [Fraction(n * n + n, 2), Fraction(n + 1, 2) + alpha] + [Fraction(i + 1, 2) + alpha for i in range(1, n)]
        den = [Fraction(n + 1, 2), Fraction(n * n + n, 2) + n * alpha] + [Fraction(i + 1, 2) for i in range(1, n)]
    elif field is ScalarField.complex:
        num = [n * n, n + alpha] + [i + alpha for i in range(1, n)]
        den = [n, n * n + n * alpha] + [i for i in range(1, n)]
    else:
        num = [2 * n * n - n, 2 * n + alpha - 1] + [2 * i - 1 + alpha for i in range(1, n)]
        den = [2 * n - 1, 2 * n * n - n + alpha * n] + [2 * i - 1 for i in range(1, n)]
    return num, den


def expected_det_alpha_exact(field: ScalarField, n: int, alpha: Number) -> Optional[Fraction]:
    """E[det^alpha] as a rational when every gamma argument is an integer or half-integer."""
    field = ScalarField.parse(field)
    _check_n(n)
    a = half_integer(alpha)
    if a is None or a < 0 or n > EXACT_MAX_N:
        return None
    num, den = _det_alpha_arguments(field, n, a)
    value = ExactVolume(1)
    for z in num:
        value = value * exact_gamma(z)
    for z in den:
        value = value / exact_gamma(z)
    return value.coeff if value.is_rational else None


def expected_det_alpha(field: ScalarField, n: int, alpha: float) -> float:
    field = ScalarField.parse(field)
    _check_n(n)
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha!r}")
    exact = expected_det_alpha_exact(field, n, alpha)
    if exact is not None:
        return float(exact)
    num, den = _det_alpha_arguments(field, n, float(alpha))
    return math.exp(sum(log_gamma(float(z)) for z in num) - sum(log_gamma(float(z)) for z in den))


def _pipeline_terms(field: ScalarField, n: int, alpha) -> List[Tuple[int, int, Number]]:
    """(sphere dimension, G first index, G second index) for every column of the recursion."""
    d = field.d
    return [((n - i) * d, (n - i) * d - 1, Fraction((i - 1) * d, 2) + alpha) for i in range(1, n)]


def exact_integral_det_alpha(field: ScalarField, n: int, alpha: Number = 0) -> ExactVolume:
    """Unnormalized integral of det^alpha over the state space, assembled column by column."""
    field = ScalarField.parse(field)
    _check_n(n, 2)
    a = half_integer(alpha)
    if a is None or a < 0:
        raise DomainError(f"exact pipeline needs a nonnegative integer or half-integer alpha, got {alpha!r}")
    value = ExactVolume(1)
    for dim, g_a, g_b in _pipeline_terms(field, n, a):
        value = value * exact_sphere_surface(dim) * exact_beta_g(g_a, g_b)
    return value * exact_simplex_moment(n, Fraction((n - 1) * field.d, 2) + a)


def integral_det_alpha(field: ScalarField, n: int, alpha: float = 0.0) -> float:
    field = ScalarField.parse(field)
    _check_n(n, 2)
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha!r}")
    if half_integer(alpha) is not None and n <= EXACT_MAX_N:
        return exact_integral_det_alpha(field, n, alpha).value()
    value = 1.0
    for dim, g_a, g_b in _pipeline_terms(field, n, alpha):
        value *= sphere_surface(dim) * beta_g(g_a, float(g_b))
    return value * simplex_moment(n, (n - 1) * field.d / 2 + alpha)


def volume_from_columns(field: ScalarField, n: int) -> ExactVolume:
    return exact_integral_det_alpha(field, n, 0)


def conditional_volume(field: ScalarField, diag: Sequence[float], det_block: float, k: int) -> float:
    """Volume of the entries outside A_{n-k}, given the diagonal and det(A_{n-k})."""
    field = ScalarField.parse(field)
    n = len(diag)
    d = field.d
    if not 1 <= k <= n - 1:
        raise DomainError(f"k must lie in [1, {n - 1}], got {k}")
    if det_block <= 0 or min(diag) <= 0:
        raise DomainError("conditional volume needs a positive diagonal and a positive-definite block")
    value = det_block ** (k * d / 2)
    for i in range(1, k + 1):
        a = diag[n - i]
        value *= a ** ((n - 1) * d / 2) * sphere_surface((n - i) * d) * beta_g((n - i) * d - 1, (i - 1) * d / 2)
    return value
