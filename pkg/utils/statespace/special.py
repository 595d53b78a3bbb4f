# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

from scipy import special as sp

from utils.statespace.errors import DomainError
from utils.statespace.models import ScalarField

Number = Union[int, float, Fraction]


class ExactVolume:
    """coeff * pi**pi_pow with a rational coefficient.

    pi_pow is a Fraction so that half-integer gamma values (rational * sqrt(pi)) can be
    carried through products; every closed-form volume ends with an integer power.
    """

    __slots__ = ('coeff', 'pi_pow')

    def __init__(self, coeff: Number = 1, pi_pow: Number = 0):
        self.coeff = Fraction(coeff)
        self.pi_pow = Fraction(pi_pow)
        if self.pi_pow.denominator not in (1, 2):
            raise DomainError(f"pi exponent must be an integer or half-integer, got {self.pi_pow}")

    def __repr__(self):
        return f"ExactVolume({self.coeff}, pi_pow={self.pi_pow})"

    def __str__(self):
        return self.to_text()

    def __eq__(self, other):
        if isinstance(other, ExactVolume):
            if self.coeff == 0 and other.coeff == 0:
                return True
            return self.coeff == other.coeff and self.pi_pow == other.pi_pow
        return NotImplemented

    def __hash__(self):
        return hash((self.coeff, self.pi_pow))

    def __mul__(self, other):
        if isinstance(other, ExactVolume):
            return ExactVolume(self.coeff * other.coeff, self.pi_pow + other.pi_pow)
        if isinstance(other, (int, Fraction)):
            return ExactVolume(self.coeff * other, self.pi_pow)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactVolume):
            return ExactVolume(self.coeff / other.coeff, self.pi_pow - other.pi_pow)
        if isinstance(other, (int, Fraction)):
            return ExactVolume(self.coeff / other, self.pi_pow)
        return NotImplemented

    def __pow__(self, power: int):
        return ExactVolume(self.coeff ** power, self.pi_pow * power)

    @property
    def is_rational(self) -> bool:
        return self.pi_pow == 0 or self.coeff == 0

    def value(self) -> float:
        return float(self.coeff) * math.pi ** float(self.pi_pow)

    def log_value(self) -> float:
        return math.log(self.coeff.numerator) - math.log(self.coeff.denominator) + float(self.pi_pow) * math.log(math.pi)

    def decimal(self, digits: int = 10) -> str:
        return f"{self.value():.{digits}g}"

    def to_text(self) -> str:
        num, den = self.coeff.numerator, self.coeff.denominator
        if num == 0:
            return "0"

        if self.pi_pow == 0:
            pi_txt = ""
        elif self.pi_pow == 1:
            pi_txt = "pi"
        elif self.pi_pow == Fraction(1, 2):
            pi_txt = "sqrt(pi)"
        elif self.pi_pow.denominator == 1:
            pi_txt = f"pi^{self.pi_pow.numerator}"
        else:
            pi_txt = f"pi^({self.pi_pow})"

        if not pi_txt:
            head = str(num)
        elif num == 1:
            head = pi_txt
        elif num == -1:
            head = f"-{pi_txt}"
        else:
            head = f"{num}*{pi_txt}"

        return head if den == 1 else f"{head}/{den}"


def half_integer(value: Number) -> Optional[Fraction]:
    """Fraction(value) when 2*value is an integer, else None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    f = Fraction(value)
    return f if (2 * f).denominator == 1 else None


def gamma_half_integer(two_z: int) -> ExactVolume:
    """Gamma(two_z / 2) as rational * pi^(0 or 1/2)."""
    if two_z <= 0:
        raise DomainError(f"gamma argument must be positive, got {two_z}/2")
    if two_z % 2 == 0:
        return ExactVolume(math.factorial(two_z // 2 - 1))
    m = (two_z - 1) // 2
    # Gamma(m + 1/2) = (2m)! / (4^m m!) * sqrt(pi)
    return ExactVolume(Fraction(math.factorial(2 * m), 4 ** m * math.factorial(m)), Fraction(1, 2))


def exact_gamma(z: Number) -> ExactVolume:
    h = half_integer(z)
    if h is None:
        raise DomainError(f"exact gamma needs an integer or half-integer argument, got {z!r}")
    return gamma_half_integer(int(2 * h))


def gamma(z: Number) -> float:
    if z <= 0:
        raise DomainError(f"gamma argument must be positive, got {z!r}")
    h = half_integer(z)
    if h is not None and h < 170:
        return exact_gamma(h).value()
    return float(sp.gamma(float(z)))


def log_gamma(z: Number) -> float:
    if z <= 0:
        raise DomainError(f"log-gamma argument must be positive, got {z!r}")
    h = half_integer(z)
    if h is not None and h < 170:
        return exact_gamma(h).log_value()
    return float(sp.gammaln(float(z)))


def exact_sphere_surface(n: int) -> ExactVolume:
    """F_{n-1} = n pi^(n/2) / Gamma(n/2 + 1), the surface of the unit sphere in R^n."""
    if n < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {n}")
    return ExactVolume(n, Fraction(n, 2)) / gamma_half_integer(n + 2)


def sphere_surface(n: int) -> float:
    return exact_sphere_surface(n).value()


def _exact_arguments(*args: Number) -> bool:
    return all(half_integer(z) is not None and 0 < z < 170 for z in args)


def exact_beta_g(a: Number, b: Number) -> ExactVolume:
    """G_{a,b} = integral of x^a (1-x^2)^b over [0, 1]; a integer, b integer or half-integer."""
    a, b = Fraction(a), Fraction(b)
    if a < 0 or b < 0:
        raise DomainError("G parameters must be nonnegative")
    if not _exact_arguments(b + 1, (a + 1) / 2, a / 2 + b + Fraction(3, 2)):
        raise DomainError(f"G({a}, {b}) has no exact rational * pi-power form")
    return (exact_gamma(b + 1) * exact_gamma((a + 1) / 2) / exact_gamma(a / 2 + b + Fraction(3, 2))) * Fraction(1, 2)


def beta_g(a: Number, b: Number) -> float:
    if a < 0 or b < 0:
        raise DomainError(f"G parameters must be nonnegative, got ({a!r}, {b!r})")
    if _exact_arguments(b + 1, Fraction(a + 1) / 2, Fraction(a) / 2 + b + Fraction(3, 2)):
        return exact_beta_g(a, b).value()
    return 0.5 * math.exp(log_gamma(b + 1) + log_gamma((a + 1) / 2) - log_gamma(a / 2 + b + 1.5))


def exact_simplex_moment(n: int, k: Number) -> ExactVolume:
    """Integral of (x_1 ... x_n)^k over the simplex in (x_1..x_{n-1}) coordinates."""
    if n < 2:
        raise DomainError(f"simplex moment needs n >= 2, got {n}")
    k = half_integer(k)
    if k is None or k < 0:
        raise DomainError("exact simplex moment needs a nonnegative integer or half-integer k")
    return exact_gamma(k + 1) ** n / exact_gamma(n * (k + 1))


def simplex_moment(n: int, k: Number) -> float:
    if n < 2 or k < 0:
        raise DomainError(f"simplex moment needs n >= 2 and k >= 0, got ({n}, {k!r})")
    if half_integer(k) is not None and n * (k + 1) < 150:
        return exact_simplex_moment(n, k).value()
    return math.exp(n * log_gamma(k + 1) - log_gamma(n * (k + 1)))


def ellipsoid_integral(field: ScalarField, m: int, det_t: float, rho: float, k: float) -> float:
    """Integral of (rho - <x, T x>)^k over the ellipsoid <x, T x> < rho.

    m is the real dimension of the domain, so m/d scalar coordinates of the field; T is
    the field-valued matrix with determinant det_t.
    """
    field = ScalarField.parse(field)
    if m < 1 or m % field.d:
        raise DomainError(f"real dimension {m} is not a positive multiple of {field.d}")
    if det_t <= 0 or rho <= 0 or k < 0:
        raise DomainError("ellipsoid integral needs det T > 0, rho > 0 and k >= 0")
    return rho ** (m / 2 + k) * sphere_surface(m) * beta_g(m - 1, k) / det_t ** (field.d / 2)


def beta_segment(a: float, b: float, t: float) -> float:
    """Integral of x^a (t - x)^b over [0, t]."""
    if a <= -1 or b <= -1 or t < 0:
        raise DomainError("beta segment needs a, b > -1 and t >= 0")
    return t ** (1 + a + b) * math.exp(log_gamma(a + 1) + log_gamma(b + 1) - log_gamma(a + b + 2))
