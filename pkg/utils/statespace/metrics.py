# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.statespace.algebra import eigenvalues_self_adjoint
from utils.statespace.errors import DomainError, UnknownFunctionError, UnsupportedFieldError
from utils.statespace.models import ScalarField, SelfAdjointState
from utils.statespace.quadrature import integrate

logger = logging.getLogger(__name__)

SERIES_RADIUS = 1e-4
COINCIDENCE_RELATIVE = 1e-7
EIGEN_CLAMP = 1e-15

DEFAULT_ALPHAS = (0.1, 0.25, 0.5)
DEFAULT_BETAS = (0.1, 0.25, 0.4)
DEFAULT_GAMMAS = (0.0, 0.25, 0.5)


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


class MonotoneFunctionDesc:

    __slots__ = ('id', 'params', '_fn', 'has_symmetry', 'normalized', '_parent')

    def __init__(self, function_id: str, fn: Callable[[np.ndarray], np.ndarray], *,
                 params: Optional[Dict[str, float]] = None, has_symmetry: bool = True, normalized: bool = True,
                 parent: Optional[MonotoneFunctionDesc] = None):
        self.id = function_id
        self.params = dict(params or {})
        self._fn = fn
        self.has_symmetry = has_symmetry
        self.normalized = normalized
        self._parent = parent

    def __repr__(self):
        return f"MonotoneFunctionDesc({self.id!r})"

    def eval(self, x):
        return _scalar_or_array(self._fn(np.asarray(x, dtype=float)))

    __call__ = eval

    @property
    def family(self) -> str:
        return self.id.split(":", 1)[0]

    def symmetry_residual(self, x) -> np.ndarray:
        """|f(x) - x f(1/x)| relative to max(1, |f(x)|)."""
        x = np.asarray(x, dtype=float)
        fx = self._fn(x)
        return np.abs(fx - x * self._fn(1.0 / x)) / np.maximum(1.0, np.abs(fx))


class AdmissibleFunctionDesc:

    __slots__ = ('id', 'params', '_fn', '_deriv')

    def __init__(self, function_id: str, fn: Callable, deriv: Callable, *, params: Optional[Dict[str, float]] = None):
        self.id = function_id
        self.params = dict(params or {})
        self._fn = fn
        self._deriv = deriv

    def __repr__(self):
        return f"AdmissibleFunctionDesc({self.id!r})"

    def eval(self, x):
        return _scalar_or_array(self._fn(np.asarray(x, dtype=float)))

    __call__ = eval

    def deriv(self, x):
        return _scalar_or_array(self._deriv(np.asarray(x, dtype=float)))


def _km(x: np.ndarray) -> np.ndarray:
    u = x - 1.0
    near = np.abs(u) < SERIES_RADIUS
    safe = np.where(near, 2.0, x)
    exact = (safe - 1.0) / np.log(safe)
    series = 1.0 + u / 2 - u ** 2 / 12 + u ** 3 / 24 - 19 * u ** 4 / 720
    return np.where(near, series, exact)


def _sld(x):
    return (1.0 + x) / 2


def _rld(x):
    return 2.0 * x / (1.0 + x)


def _geo(x):
    return np.sqrt(x)


def _wy(x):
    return (np.sqrt(x) + 1.0) ** 2 / 4


def _lm2(x):
    return 2.0 * np.sqrt(x) / (1.0 + x) * _km(x)


def _lm3(x):
    return 2.0 * _km(x) ** 2 / (1.0 + x)


def _alpha(a: float):
    return lambda x: x / 2 * (1.0 / (a * x + 1.0 - a) + 1.0 / ((1.0 - a) * x + a))


def _beta(b: float):
    return lambda x: 2.0 * (b * x + 1.0 - b) * ((1.0 - b) * x + b) / (x + 1.0)


def _gam(g: float):
    return lambda x: 2.0 * x ** (g + 0.5) / (1.0 + x ** (2 * g))


_FIXED = {
    "sld": _sld,
    "rld": _rld,
    "km": _km,
    "geo": _geo,
    "wy": _wy,
    "lm2": _lm2,
    "lm3": _lm3,
}

_FAMILIES = {
    # name: (factory, lower, upper, lower_closed, upper_closed, parameter name)
    "alpha": (_alpha, 0.0, 0.5, False, True, "alpha"),
    "beta": (_beta, 0.0, 0.5, False, False, "beta"),
    "gam": (_gam, 0.0, 0.5, True, True, "gamma"),
}


def _check_range(family: str, value: float):
    _, lo, hi, lo_closed, hi_closed, name = _FAMILIES[family]
    ok_lo = value >= lo if lo_closed else value > lo
    ok_hi = value <= hi if hi_closed else value < hi
    if not (ok_lo and ok_hi and math.isfinite(value)):
        raise DomainError(f"{name} = {value!r} is outside {'[' if lo_closed else '('}{lo}, {hi}{']' if hi_closed else ')'}")


def family_function(family: str, value: float) -> MonotoneFunctionDesc:
    if family not in _FAMILIES:
        raise UnknownFunctionError(family, list(_FAMILIES))
    value = float(value)
    _check_range(family, value)
    factory, *_, name = _FAMILIES[family]
    return MonotoneFunctionDesc(f"{family}:{value:g}", factory(value), params={name: value})


def monotone_catalog(alphas: Sequence[float] = DEFAULT_ALPHAS, betas: Sequence[float] = DEFAULT_BETAS,
                     gammas: Sequence[float] = DEFAULT_GAMMAS) -> List[MonotoneFunctionDesc]:
    catalog = [MonotoneFunctionDesc(name, fn) for name, fn in _FIXED.items()]
    catalog += [family_function("alpha", a) for a in alphas]
    catalog += [family_function("beta", b) for b in betas]
    catalog += [family_function("gam", g) for g in gammas]
    return catalog


def resolve_monotone(function_id: str) -> MonotoneFunctionDesc:
    function_id = function_id.strip()
    if function_id in _FIXED:
        return MonotoneFunctionDesc(function_id, _FIXED[function_id])
    family, sep, raw = function_id.partition(":")
    if sep and family in _FAMILIES:
        try:
            value = float(raw)
        except ValueError:
            raise DomainError(f"invalid parameter in {function_id!r}")
        return family_function(family, value)
    raise UnknownFunctionError(function_id, list(_FIXED) + [f"{f}:VALUE" for f in _FAMILIES])


def transpose(f: MonotoneFunctionDesc) -> MonotoneFunctionDesc:
    """f^perp(x) = x / f(x)."""
    if f._parent is not None:
        return f._parent
    return MonotoneFunctionDesc(f"{f.id}^perp", lambda x: x / f._fn(x), params=f.params,
                                has_symmetry=f.has_symmetry, normalized=f.normalized, parent=f)


def m_weight(f: MonotoneFunctionDesc, mu_i, mu_j):
    mu_i = np.asarray(mu_i, dtype=float)
    mu_j = np.asarray(mu_j, dtype=float)
    if np.any(mu_i <= 0) or np.any(mu_j <= 0):
        raise DomainError("eigenvalues must be positive")
    return _scalar_or_array(1.0 / (mu_j * f._fn(mu_i / mu_j)))


def _check_metric_field(field: ScalarField) -> ScalarField:
    field = ScalarField.parse(field)
    if field is ScalarField.quaternion:
        raise UnsupportedFieldError("metric volumes are defined for the real and complex fields only")
    return field


def sqrt_det_g_monotone_spectrum(field: ScalarField, f: MonotoneFunctionDesc, mu: np.ndarray) -> np.ndarray:
    """Volume density of the monotone metric from spectra of shape (..., n)."""
    field = _check_metric_field(field)
    mu = np.asarray(mu, dtype=float)
    n = mu.shape[-1]
    iu = np.triu_indices(n, 1)
    m = 1.0 / (mu[..., iu[1]] * f._fn(mu[..., iu[0]] / mu[..., iu[1]]))
    inv_sqrt_det = 1.0 / np.sqrt(np.prod(mu, axis=-1))
    if field is ScalarField.real:
        return 2.0 ** (n * (n - 1) / 4) * inv_sqrt_det * np.prod(np.sqrt(m), axis=-1)
    return 2.0 ** (n * (n - 1) / 2) * inv_sqrt_det * np.prod(m, axis=-1)


def _state_spectrum(field: ScalarField, state: SelfAdjointState) -> np.ndarray:
    if state.field is not field:
        raise DomainError(f"state is over {state.field.name}, metric requested over {field.name}")
    return eigenvalues_self_adjoint(state.matrix)


def sqrt_det_g_monotone(field: ScalarField, f: MonotoneFunctionDesc, state: SelfAdjointState) -> float:
    field = _check_metric_field(field)
    return float(sqrt_det_g_monotone_spectrum(field, f, _state_spectrum(field, state)))


def _identity(x):
    return np.array(x, dtype=float)


def _power(p: float):
    return (lambda x: p * x ** (1.0 / p)), (lambda x: x ** (1.0 / p - 1.0))


_ADMISSIBLE = {
    "identity": (_identity, lambda x: np.ones_like(x, dtype=float)),
    "log": (np.log, lambda x: 1.0 / x),
}


def resolve_admissible(function_id: str) -> AdmissibleFunctionDesc:
    function_id = function_id.strip()
    if function_id in _ADMISSIBLE:
        fn, deriv = _ADMISSIBLE[function_id]
        return AdmissibleFunctionDesc(function_id, fn, deriv)
    family, sep, raw = function_id.partition(":")
    if sep and family == "power":
        try:
            p = float(raw)
        except ValueError:
            raise DomainError(f"invalid parameter in {function_id!r}")
        if p == 0 or not math.isfinite(p):
            raise DomainError("power:P needs a finite nonzero P")
        fn, deriv = _power(p)
        return AdmissibleFunctionDesc(f"power:{p:g}", fn, deriv, params={"p": p})
    raise UnknownFunctionError(function_id, list(_ADMISSIBLE) + ["power:P"])


def admissible_catalog() -> List[AdmissibleFunctionDesc]:
    return [resolve_admissible(i) for i in ("identity", "log", "power:2", "power:3", "power:-2")]


def divided_difference(h: AdmissibleFunctionDesc, mu_i, mu_j):
    a = np.asarray(mu_i, dtype=float)
    b = np.asarray(mu_j, dtype=float)
    near = np.abs(a - b) < COINCIDENCE_RELATIVE * np.maximum(a, b)
    safe_b = np.where(near, b + 1.0, b)
    quotient = (h._fn(a) - h._fn(safe_b)) / (a - safe_b)
    return _scalar_or_array(np.where(near, h._deriv((a + b) / 2), quotient))


def sqrt_det_g_pullback_spectrum(field: ScalarField, h: AdmissibleFunctionDesc, mu: np.ndarray) -> np.ndarray:
    """Volume density of the pull-back metric g_h from spectra of shape (..., n)."""
    field = _check_metric_field(field)
    mu = np.asarray(mu, dtype=float)
    clipped = np.clip(mu, EIGEN_CLAMP, 1.0 - EIGEN_CLAMP)
    if np.any(clipped != mu):
        logger.warning("pull-back metric: %d eigenvalues clamped into [%g, 1 - %g]",
                       int(np.count_nonzero(clipped != mu)), EIGEN_CLAMP, EIGEN_CLAMP)
    mu = clipped
    n = mu.shape[-1]
    iu = np.triu_indices(n, 1)

    hp2 = h._deriv(mu) ** 2
    diag_factor = np.zeros(mu.shape[:-1])
    for i in range(n):
        diag_factor = diag_factor + np.prod(np.delete(hp2, i, axis=-1), axis=-1)

    dd = np.asarray(divided_difference(h, mu[..., iu[0]], mu[..., iu[1]]))
    if field is ScalarField.real:
        return 2.0 ** (n * (n - 1) / 4) * np.sqrt(diag_factor) * np.prod(dd, axis=-1)
    return 2.0 ** (n * (n - 1) / 2) * np.sqrt(diag_factor) * np.prod(dd ** 2, axis=-1)


def sqrt_det_g_pullback(field: ScalarField, h: AdmissibleFunctionDesc, state: SelfAdjointState) -> float:
    field = _check_metric_field(field)
    return float(sqrt_det_g_pullback_spectrum(field, h, _state_spectrum(field, state)))


def monotone_functional(field: ScalarField, f: MonotoneFunctionDesc):
    field = _check_metric_field(field)
    return lambda batch: sqrt_det_g_monotone_spectrum(field, f, batch.eigenvalues)


def pullback_functional(field: ScalarField, h: AdmissibleFunctionDesc):
    field = _check_metric_field(field)
    return lambda batch: sqrt_det_g_pullback_spectrum(field, h, batch.eigenvalues)


class LownerMeasure:
    """Probability measure on [0, 1]: atoms plus an optional density on (0, 1)."""

    __slots__ = ('atoms', 'density', 'name')

    def __init__(self, atoms: Sequence[Tuple[float, float]] = (), density: Optional[Callable] = None,
                 name: str = "custom"):
        self.atoms = [(float(z), float(w)) for z, w in atoms]
        self.density = density
        self.name = name
        for z, w in self.atoms:
            if not 0.0 <= z <= 1.0 or w < 0.0:
                raise DomainError(f"atom ({z}, {w}) must sit in [0, 1] with nonnegative weight")

    def __repr__(self):
        return f"LownerMeasure({self.name!r}, atoms={self.atoms})"

    def mirrored(self) -> LownerMeasure:
        density = None
        if self.density is not None:
            base = self.density
            density = lambda z: base(1.0 - np.asarray(z, dtype=float))
        return LownerMeasure([(1.0 - z, w) for z, w in self.atoms], density, name=f"{self.name}~")

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        for z, w in self.atoms:
            if abs(z - 0.5) <= tol:
                continue
            mates = [v for y, v in self.atoms if abs(y - (1.0 - z)) <= tol]
            if abs(sum(mates) - w) > tol:
                return False
        if self.density is not None:
            grid = np.linspace(0.01, 0.49, 49)
            left = np.asarray(self.density(grid), dtype=float)
            right = np.asarray(self.density(1.0 - grid), dtype=float)
            if np.any(np.abs(left - right) > tol * np.maximum(1.0, np.abs(left))):
                return False
        return True

    def density_mass(self) -> float:
        if self.density is None:
            return 0.0
        return integrate(self.density).value

    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + self.density_mass()


def point_mass(z: float = 0.5) -> LownerMeasure:
    if z == 0.5:
        return LownerMeasure([(0.5, 1.0)], name="point:0.5")
    return LownerMeasure([(z, 0.5), (1.0 - z, 0.5)], name=f"point:{z:g}")


def uniform_measure() -> LownerMeasure:
    return LownerMeasure(density=lambda z: np.ones_like(np.asarray(z, dtype=float)), name="uniform")


def arcsine_measure() -> LownerMeasure:
    return LownerMeasure(density=lambda z: 1.0 / (math.pi * np.sqrt(z * (1.0 - z))), name="arcsine")


def measure_to_function(mu: LownerMeasure) -> MonotoneFunctionDesc:
    """Loewner map x -> integral of x / ((1 - t) x + t) d mu(t)."""

    def at(x: float) -> float:
        total = sum(w * x / ((1.0 - z) * x + z) for z, w in mu.atoms)
        if mu.density is not None:
            total += integrate(lambda t: x / ((1.0 - t) * x + t) * mu.density(t)).value
        return total

    fn = np.vectorize(at, otypes=[float])
    return MonotoneFunctionDesc(f"loewner({mu.name})", fn, has_symmetry=mu.is_symmetric())
