# -*- coding: utf-8 -*-
from __future__ import annotations

import asyncio
import logging
import math
from collections import namedtuple
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from utils.statespace.errors import AsymmetricMeasureError, DomainError, UnsupportedFieldError
from utils.statespace.metrics import (
    AdmissibleFunctionDesc, LownerMeasure, MonotoneFunctionDesc, m_weight, monotone_catalog, transpose,
)
from utils.statespace.models import ScalarField, StokesPoint
from utils.statespace.quadrature import (
    DIVERGENCE_THRESHOLD, EndpointProbe, QuadratureResult, QuadratureVerdict, classify_integral, endpoint_exponent,
    integrate,
)

logger = logging.getLogger(__name__)

# Lebesgue volume element of matrix entries per Stokes volume element
STOKES_JACOBIAN = {ScalarField.real: 0.25, ScalarField.complex: 0.125}

KERNEL_HALF_SWITCH = 1e-3
KERNEL_ORIGIN_SWITCH = 1e-10
MASS_TOLERANCE = 1e-8
TABLE_TOLERANCE = 5e-3


def _qubit_field(field) -> ScalarField:
    field = ScalarField.parse(field)
    if field is ScalarField.quaternion:
        raise UnsupportedFieldError("qubit metric volumes are defined for the real and complex fields only")
    return field


def stokes_metric(point: StokesPoint, f: MonotoneFunctionDesc) -> np.ndarray:
    """Metric g_f at a Stokes point, in Cartesian Stokes coordinates.

    Radially 1 / (4 l1 l2), tangentially m(l1, l2) / 2.
    """
    l1, l2 = point.eigenvalues
    radial = 1.0 / (4.0 * l1 * l2)
    tangential = m_weight(f, l2, l1) / 2
    dim = point.coordinates.size
    if point.r == 0.0:
        return np.diag([radial] + [tangential] * (dim - 1))
    u = point.coordinates / point.r
    projector = np.outer(u, u)
    return radial * projector + tangential * (np.eye(dim) - projector)


def _monotone_t_integrand(field: ScalarField, f: MonotoneFunctionDesc) -> Callable:
    if field is ScalarField.complex:
        return lambda t: 2.0 * math.pi * ((1.0 - t) / (1.0 + t)) ** 2 / (np.sqrt(t) * f(t))
    return lambda t: math.sqrt(2.0) * math.pi * (1.0 - t) / (1.0 + t) / (np.sqrt(t + t * t) * np.sqrt(f(t)))


def _monotone_r_integrand(field: ScalarField, f: MonotoneFunctionDesc) -> Callable:
    if field is ScalarField.complex:
        return lambda r: 4.0 * math.pi * r * r / (np.sqrt(1.0 - r * r) * (1.0 + r) * f((1.0 - r) / (1.0 + r)))
    return lambda r: 2.0 * math.pi * r / (np.sqrt(1.0 - r) * (1.0 + r) * np.sqrt(f((1.0 - r) / (1.0 + r))))


def qubit_volume_monotone(field, f: MonotoneFunctionDesc, **quad_options) -> QuadratureVerdict:
    """Volume of the qubit state space under the monotone metric g_f (t-form, probed at t -> 0)."""
    field = _qubit_field(field)
    return classify_integral(_monotone_t_integrand(field, f), (0,), **quad_options)


def qubit_volume_monotone_radial(field, f: MonotoneFunctionDesc, **quad_options) -> QuadratureVerdict:
    """Same volume as an integral over the Bloch radius, probed at r -> 1."""
    field = _qubit_field(field)
    return classify_integral(_monotone_r_integrand(field, f), (1,), **quad_options)


def _pullback_integrand(field: ScalarField, h: AdmissibleFunctionDesc) -> Callable:
    power, prefactor = (2, math.pi) if field is ScalarField.complex else (1, math.pi / math.sqrt(2.0))

    def integrand(r):
        l1, l2 = (1.0 + r) / 2, (1.0 - r) / 2
        norm = np.sqrt(h.deriv(l1) ** 2 + h.deriv(l2) ** 2)
        return prefactor * norm * (h(l1) - h(l2)) ** power

    return integrand


def qubit_volume_pullback(field, h: AdmissibleFunctionDesc, **quad_options) -> QuadratureVerdict:
    field = _qubit_field(field)
    return classify_integral(_pullback_integrand(field, h), (1,), **quad_options)


def lowner_kernel_series(z, terms: int = 4):
    """Expansion of K at the origin: 2 pi (pi/sqrt(z) - (4 + pi) + 9 pi/2 sqrt(z) - 4 (10/3 + pi) z)."""
    z = np.asarray(z, dtype=float)
    s = np.sqrt(z)
    coefficients = [math.pi / s, -(4.0 + math.pi), 4.5 * math.pi * s, -4.0 * (10.0 / 3 + math.pi) * z]
    if not 1 <= terms <= len(coefficients):
        raise DomainError(f"the origin series has 1 to {len(coefficients)} terms, got {terms}")
    value = 2.0 * math.pi * sum(coefficients[:terms])
    return float(value) if np.ndim(value) == 0 else value


def lowner_kernel(z):
    """K(z) = 2 pi [2/u - pi/u^2 + arccos(u) / (u^2 sqrt(z - z^2))] with u = 2z - 1.

    arccos(u) is taken as 2 asin(sqrt(1 - z)); K(1/2) = pi^2, K(1) = 2 pi (4 - pi), and
    K(z) ~ 2 pi^2 / sqrt(z) at the origin.
    """
    z = np.asarray(z, dtype=float)
    if np.any((z <= 0.0) | (z >= 1.0)):
        raise DomainError("the Loewner kernel is evaluated on the open interval (0, 1)")

    u = 2.0 * z - 1.0
    near_half = np.abs(u) < KERNEL_HALF_SWITCH
    near_origin = z < KERNEL_ORIGIN_SWITCH
    safe_u = np.where(near_half, 1.0, u)
    safe_z = np.where(near_origin, 0.25, z)

    with np.errstate(all='ignore'):
        ratio = 2.0 * np.arcsin(np.sqrt(1.0 - safe_z)) / np.sqrt(safe_z * (1.0 - safe_z))
        direct = 2.0 * math.pi * (2.0 / safe_u - math.pi / safe_u ** 2 + ratio / safe_u ** 2)
        half = 2.0 * math.pi * (math.pi / 2 - 4.0 / 3 * u + 3.0 * math.pi / 8 * u ** 2 - 16.0 / 15 * u ** 3)
        origin = lowner_kernel_series(np.where(near_origin, z, 0.25))

    value = np.where(near_half, half, np.where(near_origin, origin, direct))
    return float(value) if np.ndim(value) == 0 else value


def lowner_kernel_symmetric(z):
    z = np.asarray(z, dtype=float)
    value = 0.5 * (np.asarray(lowner_kernel(z)) + np.asarray(lowner_kernel(1.0 - z)))
    return float(value) if np.ndim(value) == 0 else value


def lowner_kernel_oracle(z: float, **quad_options) -> float:
    """K(z) as the t-integral 2 pi int ((1-t)/(1+t))^2 t^(-1/2) / ((1-z) t + z) dt."""
    return integrate(lambda t: 2.0 * math.pi * ((1.0 - t) / (1.0 + t)) ** 2 / (np.sqrt(t) * ((1.0 - z) * t + z)),
                     **quad_options).value


def volume_from_measure(mu: LownerMeasure, *, threshold: float = DIVERGENCE_THRESHOLD,
                        **quad_options) -> QuadratureVerdict:
    """Complex qubit volume for the metric whose 1/f is represented by mu."""
    if not mu.is_symmetric():
        raise AsymmetricMeasureError(f"measure {mu.name!r} is not symmetric under z -> 1 - z")
    mass = mu.total_mass()
    if abs(mass - 1.0) > MASS_TOLERANCE:
        raise AsymmetricMeasureError(f"measure {mu.name!r} has total mass {mass!r}, expected 1")

    for z, w in mu.atoms:
        if w > 0.0 and z in (0.0, 1.0):
            return QuadratureVerdict.infinite(EndpointProbe(math.inf, int(z), (), True))

    probes = []
    flags = []
    value = sum(w * lowner_kernel(z) for z, w in mu.atoms)
    err = 0.0
    converged = True

    if mu.density is not None:
        density = mu.density
        probe = endpoint_exponent(lambda z: density(z) / np.sqrt(z), 0)
        probes.append(probe)
        if probe.diverges(threshold):
            return QuadratureVerdict.infinite(probe, probes)
        if not probe.conclusive:
            flags.append("inconclusive_probe")
        part = integrate(lambda z: lowner_kernel(z) * density(z), **quad_options)
        value += part.value
        err = part.err_est
        converged = part.converged
        if not converged:
            flags.append("not_converged")

    return QuadratureVerdict.finite(QuadratureResult(value, err, 0, converged), probes, flags)


ClosedForm = namedtuple('ClosedForm', 'text value approximate')

INFINITE = ClosedForm("inf", math.inf, False)
OPEN = ClosedForm("?<inf", None, False)


def _beta_row(beta: float) -> float:
    root = math.sqrt(beta - beta * beta)
    return math.pi ** 2 * (1.0 - 2.0 * root) / ((1.0 - 2.0 * beta) ** 2 * root)


_KNOWN_VALUES: Dict[str, Dict[ScalarField, ClosedForm]] = {
    "sld": {ScalarField.complex: ClosedForm("pi^2", math.pi ** 2, False),
            ScalarField.real: ClosedForm("2*pi", 2 * math.pi, False)},
    "rld": {ScalarField.complex: INFINITE, ScalarField.real: INFINITE},
    "km": {ScalarField.complex: ClosedForm("2*pi^2", 2 * math.pi ** 2, False),
           ScalarField.real: ClosedForm("~8.298", 8.298, True)},
    "geo": {ScalarField.complex: INFINITE, ScalarField.real: ClosedForm("4*pi", 4 * math.pi, False)},
    "wy": {ScalarField.complex: ClosedForm("4*pi*(pi-2)", 4 * math.pi * (math.pi - 2), False),
           ScalarField.real: ClosedForm("4*pi*(2-sqrt(2))", 4 * math.pi * (2 - math.sqrt(2)), False)},
    "lm2": {ScalarField.complex: INFINITE, ScalarField.real: ClosedForm("~19.986", 19.986, True)},
    "lm3": {ScalarField.complex: ClosedForm("pi^4/2", math.pi ** 4 / 2, False),
            ScalarField.real: ClosedForm("~11.51", 11.51, True)},
    "alpha": {ScalarField.complex: INFINITE, ScalarField.real: INFINITE},
    "gam": {ScalarField.complex: INFINITE, ScalarField.real: OPEN},
}


def known_closed_form(f: MonotoneFunctionDesc, field: ScalarField) -> Optional[ClosedForm]:
    field = _qubit_field(field)
    if f.family == "beta":
        if field is ScalarField.real:
            return OPEN
        beta = f.params["beta"]
        return ClosedForm(f"pi^2(1-2sqrt(b-b^2))/((1-2b)^2 sqrt(b-b^2)), b={beta:g}", _beta_row(beta), False)
    return _KNOWN_VALUES.get(f.family, {}).get(field)


class QubitVolumeRow:

    __slots__ = ('function_id', 'params', 'closed_forms', 'verdicts', 'flags')

    def __init__(self, f: MonotoneFunctionDesc, verdicts: Dict[ScalarField, QuadratureVerdict]):
        self.function_id = f.id
        self.params = dict(f.params)
        self.verdicts = verdicts
        self.closed_forms = {field: known_closed_form(f, field) for field in verdicts}
        self.flags = {field: self._flags(field) for field in verdicts}

    def __repr__(self):
        return (f"QubitVolumeRow({self.function_id!r}, complex={self.computed_complex!r}, "
                f"real={self.computed_real!r})")

    @property
    def computed_complex(self) -> QuadratureVerdict:
        return self.verdicts[ScalarField.complex]

    @property
    def computed_real(self) -> QuadratureVerdict:
        return self.verdicts[ScalarField.real]

    def closed_form(self, field) -> Optional[ClosedForm]:
        return self.closed_forms[ScalarField.parse(field)]

    def rel_error(self, field) -> Optional[float]:
        field = ScalarField.parse(field)
        return relative_error(self.verdicts[field], self.closed_forms[field])

    def _flags(self, field: ScalarField) -> List[str]:
        verdict = self.verdicts[field]
        closed = self.closed_forms[field]
        flags = set(verdict.flags)

        if closed is OPEN:
            flags.add("listed_as_open")
        elif closed is not None:
            if math.isinf(closed.value) == verdict.is_finite:
                flags.add("verdict_mismatch")
            else:
                err = self.rel_error(field)
                if err is not None and err > TABLE_TOLERANCE:
                    flags.add("closed_form_mismatch")

        if field is ScalarField.complex and ScalarField.real in self.verdicts:
            if self.verdicts[ScalarField.complex].value >= self.verdicts[ScalarField.real].value:
                flags.add("complex_ge_real")
        return sorted(flags)

    def records(self) -> List[dict]:
        out = []
        for field in (ScalarField.complex, ScalarField.real):
            if field not in self.verdicts:
                continue
            verdict = self.verdicts[field]
            closed = self.closed_forms[field]
            out.append({
                "id": self.function_id,
                "params": self.params,
                "field": field.name,
                "verdict": verdict.kind,
                "value": verdict.value if verdict.is_finite else None,
                "exponent": verdict.exponent,
                "closed_form": closed.text if closed is not None else None,
                "rel_error": self.rel_error(field),
                "flags": self.flags[field],
            })
        return out


def _row(f: MonotoneFunctionDesc, quad_options: dict) -> QubitVolumeRow:
    return QubitVolumeRow(f, {field: qubit_volume_monotone(field, f, **quad_options)
                              for field in (ScalarField.complex, ScalarField.real)})


async def _gather_rows(catalog: List[MonotoneFunctionDesc], quad_options: dict):
    return await asyncio.gather(*[asyncio.to_thread(_row, f, quad_options) for f in catalog])


def reproduce_table(catalog: Optional[Iterable[MonotoneFunctionDesc]] = None, *, threads: int = 1,
                    **quad_options) -> List[QubitVolumeRow]:
    """Complex and real qubit volumes for every catalog entry, in catalog order."""
    catalog = list(catalog if catalog is not None else monotone_catalog())
    if threads > 1:
        return list(asyncio.run(_gather_rows(catalog, quad_options)))
    return [_row(f, quad_options) for f in catalog]


TransposePair = namedtuple('TransposePair', 'function_id verdict transpose_verdict dichotomy')


def transpose_dichotomy(catalog: Optional[Iterable[MonotoneFunctionDesc]] = None,
                        **quad_options) -> List[TransposePair]:
    """For every f with a finite complex volume: is the volume of f^perp infinite?"""
    pairs = []
    for f in (catalog if catalog is not None else monotone_catalog()):
        verdict = qubit_volume_monotone(ScalarField.complex, f, **quad_options)
        if not verdict.is_finite:
            continue
        other = qubit_volume_monotone(ScalarField.complex, transpose(f), **quad_options)
        pairs.append(TransposePair(f.id, verdict, other, not other.is_finite))
    return pairs


_PULLBACK_VALUES: Dict[str, Dict[ScalarField, ClosedForm]] = {
    "identity": {ScalarField.complex: ClosedForm("sqrt(2)*pi/3", math.sqrt(2) * math.pi / 3, False),
                 ScalarField.real: ClosedForm("pi/2", math.pi / 2, False)},
    "log": {ScalarField.complex: INFINITE, ScalarField.real: INFINITE},
}


def pullback_closed_form(h: AdmissibleFunctionDesc, field) -> Optional[ClosedForm]:
    return _PULLBACK_VALUES.get(h.id, {}).get(_qubit_field(field))


def relative_error(verdict: QuadratureVerdict, closed: Optional[ClosedForm]) -> Optional[float]:
    if closed is None or closed.value is None or math.isinf(closed.value) or not verdict.is_finite:
        return None
    return abs(verdict.value - closed.value) / abs(closed.value)
