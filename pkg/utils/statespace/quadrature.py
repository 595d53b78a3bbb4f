# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
from scipy.special import expit

from utils.statespace.errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-13
DEFAULT_MAX_LEVEL = 12
MIN_LEVEL = 3
T_MAX = 6.5

PROBE_DISTANCES = (1e-4, 1e-6, 1e-8)
PROBE_AGREEMENT = 0.05
DIVERGENCE_THRESHOLD = 0.99


@lru_cache(maxsize=None)
def _level_nodes(level: int) -> Tuple[np.ndarray, np.ndarray]:
    """Abscissae and weights on (0, 1) added at ``level`` (step 2^-level in t).

    x(t) = 1/2 (1 + tanh(pi/2 sinh t)) is written as expit(pi sinh t), so 1 - x is
    expit(-pi sinh t) and the weight pi cosh(t) x (1 - x) keeps full precision near both ends.
    """
    h = 2.0 ** -level
    if level == 0:
        t = np.arange(-math.floor(T_MAX), math.floor(T_MAX) + 1, dtype=float)
    else:
        half = h * np.arange(1, int(T_MAX / h) + 1, 2)
        t = np.concatenate([-half[::-1], half])

    s = math.pi * np.sinh(t)
    x = expit(s)
    xc = expit(-s)
    w = math.pi * np.cosh(t) * x * xc
    keep = (x > 0.0) & (xc > 0.0) & (x < 1.0) & (w > 0.0)
    x, w = x[keep], w[keep]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    with np.errstate(all='ignore'):
        try:
            values = np.asarray(f(x), dtype=float)
            if values.shape != x.shape:
                raise ValueError
        except (TypeError, ValueError):
            values = np.array([f(float(xi)) for xi in x], dtype=float)

    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise QuadratureError(float(x[i]), float(values[i]))
    return values


class QuadratureResult:

    __slots__ = ('value', 'err_est', 'levels_used', 'converged', 'n_evaluations')

    def __init__(self, value: float, err_est: float, levels_used: int, converged: bool, n_evaluations: int = 0):
        self.value = value
        self.err_est = err_est
        self.levels_used = levels_used
        self.converged = converged
        self.n_evaluations = n_evaluations

    def __repr__(self):
        return (f"QuadratureResult(value={self.value!r}, err_est={self.err_est:.2e}, "
                f"levels_used={self.levels_used}, converged={self.converged})")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "err_est": self.err_est,
            "levels_used": self.levels_used,
            "converged": self.converged,
        }


def integrate(f: Callable, rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL,
              max_level: int = DEFAULT_MAX_LEVEL) -> QuadratureResult:
    """tanh-sinh quadrature of f over (0, 1).

    f is called with a numpy array of abscissae; scalar-only callables are evaluated
    point by point.
    """
    if rel_tol <= 0 and abs_tol <= 0:
        raise DomainError("at least one positive tolerance is required")

    total = 0.0
    estimate = previous = math.nan
    n_eval = 0

    for level in range(max_level + 1):
        x, w = _level_nodes(level)
        total += float(np.dot(w, _evaluate(f, x)))
        n_eval += x.size
        previous, estimate = estimate, total * 2.0 ** -level
        if level >= MIN_LEVEL:
            err = abs(estimate - previous)
            if err <= max(rel_tol * abs(estimate), abs_tol):
                return QuadratureResult(estimate, err, level, True, n_eval)

    err = abs(estimate - previous)
    logger.warning("tanh-sinh did not converge after %d levels (value %.12g, difference %.2e)",
                   max_level, estimate, err)
    return QuadratureResult(estimate, err, max_level, False, n_eval)


class EndpointProbe(float):
    """Local exponent p of f ~ dist^-p at an endpoint, with the slope data behind it."""

    def __new__(cls, exponent: float, endpoint: int, slopes: Tuple[float, ...], conclusive: bool):
        self = super().__new__(cls, exponent)
        self.endpoint = endpoint
        self.slopes = slopes
        self.conclusive = conclusive
        return self

    def __repr__(self):
        return (f"EndpointProbe({float(self):.4f}, endpoint={self.endpoint}, "
                f"slopes={tuple(round(s, 4) for s in self.slopes)}, conclusive={self.conclusive})")

    def diverges(self, threshold: float = DIVERGENCE_THRESHOLD) -> bool:
        # both slopes past the threshold settles it even when they disagree
        if self.slopes and min(self.slopes) >= threshold:
            return True
        return self.conclusive and float(self) >= threshold

    def to_dict(self) -> dict:
        return {
            "exponent": float(self),
            "endpoint": self.endpoint,
            "slopes": list(self.slopes),
            "conclusive": self.conclusive,
        }


def endpoint_exponent(f: Callable, endpoint: int = 0, *, distances: Iterable[float] = PROBE_DISTANCES,
                      agreement: float = PROBE_AGREEMENT) -> EndpointProbe:
    if endpoint not in (0, 1):
        raise DomainError(f"endpoint must be 0 or 1, got {endpoint!r}")
    distances = tuple(distances)
    points = [d if endpoint == 0 else 1.0 - d for d in distances]

    values = [abs(float(v)) for v in _evaluate(f, np.array(points, dtype=float))]

    if min(values) == 0.0:
        # integrand vanishes at the probe points
        return EndpointProbe(-math.inf, endpoint, (), True)

    logs = [math.log(v) for v in values]
    slopes = tuple(-(logs[i + 1] - logs[i]) / (math.log(distances[i + 1]) - math.log(distances[i]))
                   for i in range(len(distances) - 1))
    conclusive = max(slopes) - min(slopes) <= agreement
    probe = EndpointProbe(sum(slopes) / len(slopes), endpoint, slopes, conclusive)
    if not conclusive:
        logger.warning("inconclusive endpoint probe at %d: slopes %s", endpoint,
                       ", ".join(f"{s:.4f}" for s in slopes))
    return probe


class QuadratureVerdict:

    __slots__ = ('kind', 'result', 'exponent', 'endpoint', 'probes', 'flags')

    def __init__(self, kind: str, *, result: Optional[QuadratureResult] = None, exponent: Optional[float] = None,
                 endpoint: Optional[int] = None, probes: Iterable[EndpointProbe] = (), flags: Iterable[str] = ()):
        self.kind = kind
        self.result = result
        self.exponent = exponent
        self.endpoint = endpoint
        self.probes = list(probes)
        self.flags = list(flags)

    @classmethod
    def finite(cls, result: QuadratureResult, probes: Iterable[EndpointProbe] = (), flags: Iterable[str] = ()):
        return cls("finite", result=result, probes=probes, flags=flags)

    @classmethod
    def infinite(cls, probe: EndpointProbe, probes: Iterable[EndpointProbe] = ()):
        probes = list(probes) or [probe]
        return cls("infinite", exponent=float(probe), endpoint=probe.endpoint, probes=probes)

    def __repr__(self):
        if self.is_finite:
            return f"Finite({self.value!r})"
        return f"Infinite(exponent={self.exponent:.3f}, endpoint={self.endpoint})"

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def value(self) -> float:
        return self.result.value if self.is_finite else math.inf

    def describe(self, digits: int = 10, variable: str = "t") -> str:
        if self.is_finite:
            return f"finite ({self.value:.{digits}g})"
        return f"infinite (exponent ≈ {self.exponent:.2f} at {variable}→{self.endpoint})"

    def to_dict(self) -> dict:
        data = {"verdict": self.kind, "value": self.value if self.is_finite else None, "flags": list(self.flags)}
        if self.is_finite:
            data["err_est"] = self.result.err_est
            data["converged"] = self.result.converged
        else:
            data["exponent"] = self.exponent
            data["endpoint"] = self.endpoint
        data["probes"] = [p.to_dict() for p in self.probes]
        return data


def classify_integral(f: Callable, endpoints: Iterable[int] = (0,), *, threshold: float = DIVERGENCE_THRESHOLD,
                      agreement: float = PROBE_AGREEMENT, rel_tol: float = DEFAULT_REL_TOL,
                      abs_tol: float = DEFAULT_ABS_TOL, max_level: int = DEFAULT_MAX_LEVEL) -> QuadratureVerdict:
    """Probe the given endpoints first; only integrands that pass every probe are integrated."""
    probes: List[EndpointProbe] = []
    flags: List[str] = []

    for endpoint in endpoints:
        probe = endpoint_exponent(f, endpoint, agreement=agreement)
        probes.append(probe)
        if probe.diverges(threshold):
            return QuadratureVerdict.infinite(probe, probes)
        if not probe.conclusive:
            flags.append("inconclusive_probe")

    result = integrate(f, rel_tol=rel_tol, abs_tol=abs_tol, max_level=max_level)
    if not result.converged:
        flags.append("not_converged")
    return QuadratureVerdict.finite(result, probes, sorted(set(flags)))
