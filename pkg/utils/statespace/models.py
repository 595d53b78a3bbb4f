# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from collections import namedtuple
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from utils.statespace.errors import DomainError

TRACE_TOLERANCE = 1e-12


class ScalarField(Enum):

    real = 1
    complex = 2
    quaternion = 4

    @property
    def d(self) -> int:
        return self.value

    @classmethod
    def parse(cls, name: Union[str, ScalarField]) -> ScalarField:
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).lower()]
        except KeyError:
            raise DomainError(f"unknown scalar field {name!r} (use real, complex or quaternion)")

    @property
    def basis(self) -> np.ndarray:
        """Left-multiplication matrices of the unit elements acting on real components."""
        return _BASIS[self]

    @property
    def conj_signs(self) -> np.ndarray:
        return _CONJ_SIGNS[self]

    @property
    def component_names(self) -> tuple:
        return _COMPONENT_NAMES[self]


_BASIS = {
    ScalarField.real: np.array([[[1.0]]]),
    ScalarField.complex: np.array([
        [[1.0, 0.0], [0.0, 1.0]],
        [[0.0, -1.0], [1.0, 0.0]],
    ]),
    ScalarField.quaternion: np.array([
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    ], dtype=float),
}

_CONJ_SIGNS = {
    ScalarField.real: np.array([1.0]),
    ScalarField.complex: np.array([1.0, -1.0]),
    ScalarField.quaternion: np.array([1.0, -1.0, -1.0, -1.0]),
}

_COMPONENT_NAMES = {
    ScalarField.real: ("",),
    ScalarField.complex: ("re", "im"),
    ScalarField.quaternion: ("w", "x", "y", "z"),
}


class Quaternion(namedtuple('Quaternion', 'w, x, y, z')):

    __slots__ = ()

    def __new__(cls, w=0.0, x=0.0, y=0.0, z=0.0):
        return super().__new__(cls, float(w), float(x), float(y), float(z))

    @classmethod
    def coerce(cls, value) -> Quaternion:
        if isinstance(value, cls):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(value)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Quaternion):
            if isinstance(other, (int, float)):
                return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
            other = Quaternion.coerce(other)
        a1, b1, c1, d1 = self
        a2, b2, c2, d2 = other
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self

    def conjugate(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def reciprocal(self) -> Quaternion:
        n2 = self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2
        if n2 == 0.0:
            raise ZeroDivisionError("quaternion reciprocal of zero")
        return self.conjugate() * (1.0 / n2)

    def to_complex_pair(self) -> tuple:
        """q = alpha + beta j with alpha = w + xi, beta = y + zi."""
        return complex(self.w, self.x), complex(self.y, self.z)


class SelfAdjointMatrix:
    """Dense self-adjoint matrix stored as real components of shape (n, n, d).

    Only the upper triangle is read on construction; the lower triangle is the
    conjugate mirror and the diagonal keeps its real part only.
    """

    __slots__ = ('field', 'n', 'components')

    def __init__(self, field: ScalarField, components: np.ndarray):
        field = ScalarField.parse(field)
        comps = np.array(components, dtype=float)
        if comps.ndim == 2 and field is ScalarField.real:
            comps = comps[..., None]
        if comps.ndim != 3 or comps.shape[0] != comps.shape[1] or comps.shape[2] != field.d:
            raise DomainError(f"components must have shape (n, n, {field.d}), got {comps.shape}")
        self.field = field
        self.n = comps.shape[0]
        self.components = hermitize(field, comps)

    @classmethod
    def from_array(cls, array, field: Optional[ScalarField] = None) -> SelfAdjointMatrix:
        arr = np.asarray(array)
        if field is None:
            field = ScalarField.complex if np.iscomplexobj(arr) else ScalarField.real
        field = ScalarField.parse(field)
        if field is ScalarField.quaternion:
            raise DomainError("use from_quaternions or raw components for quaternionic matrices")
        if field is ScalarField.real:
            if np.iscomplexobj(arr) and np.abs(arr.imag).max(initial=0.0) > 0:
                raise DomainError("real field requested for a matrix with imaginary parts")
            return cls(field, np.real(arr)[..., None])
        return cls(field, np.stack([arr.real, arr.imag], axis=-1))

    @classmethod
    def from_quaternions(cls, rows: Sequence[Sequence]) -> SelfAdjointMatrix:
        comps = np.array([[tuple(Quaternion.coerce(q)) for q in row] for row in rows], dtype=float)
        return cls(ScalarField.quaternion, comps)

    @classmethod
    def identity(cls, field: ScalarField, n: int) -> SelfAdjointMatrix:
        return cls.diagonal(field, np.ones(n))

    @classmethod
    def diagonal(cls, field: ScalarField, values: Iterable[float]) -> SelfAdjointMatrix:
        field = ScalarField.parse(field)
        values = np.asarray(list(values), dtype=float)
        comps = np.zeros((len(values), len(values), field.d))
        comps[np.arange(len(values)), np.arange(len(values)), 0] = values
        return cls(field, comps)

    def __repr__(self):
        return f"SelfAdjointMatrix(field={self.field.name}, n={self.n})"

    def entry(self, i: int, j: int):
        c = self.components[i, j]
        if self.field is ScalarField.real:
            return float(c[0])
        if self.field is ScalarField.complex:
            return complex(c[0], c[1])
        return Quaternion(*c)

    @property
    def diagonal_values(self) -> np.ndarray:
        return self.components[np.arange(self.n), np.arange(self.n), 0].copy()

    @property
    def trace(self) -> float:
        return float(self.diagonal_values.sum())

    def leading(self, k: int) -> SelfAdjointMatrix:
        return SelfAdjointMatrix(self.field, self.components[:k, :k])

    def to_numpy(self) -> np.ndarray:
        """Real or complex ndarray; quaternionic matrices map through the complex embedding."""
        if self.field is ScalarField.real:
            return self.components[..., 0].copy()
        if self.field is ScalarField.complex:
            return self.components[..., 0] + 1j * self.components[..., 1]
        return embed_components(self.components)

    def real_representation(self) -> np.ndarray:
        return real_representation(self.field, self.components)

    def scaled(self, factor: float) -> SelfAdjointMatrix:
        return SelfAdjointMatrix(self.field, self.components * factor)

    def max_abs_difference(self, other: SelfAdjointMatrix) -> float:
        return float(np.abs(self.components - other.components).max(initial=0.0))


class SelfAdjointState:
    """Positive-definite, trace-1 self-adjoint matrix with its leading minors."""

    __slots__ = ('matrix', 'minors')

    def __init__(self, matrix: SelfAdjointMatrix, minors: np.ndarray):
        self.matrix = matrix
        self.minors = minors

    @classmethod
    def from_matrix(cls, matrix: SelfAdjointMatrix) -> SelfAdjointState:
        from utils.statespace.algebra import leading_minor_determinants

        if abs(matrix.trace - 1.0) > TRACE_TOLERANCE:
            raise DomainError(f"state must have unit trace, got {matrix.trace!r}")
        minors = leading_minor_determinants(matrix)
        if np.any(minors <= 0.0):
            k = int(np.argmax(minors <= 0.0)) + 1
            raise DomainError(f"state is not positive definite (det A_{k} = {minors[k - 1]:.3e})")
        return cls(matrix, minors)

    @property
    def field(self) -> ScalarField:
        return self.matrix.field

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def det(self) -> float:
        return float(self.minors[-1])

    def __repr__(self):
        return f"SelfAdjointState(field={self.field.name}, n={self.n}, det={self.det:.6g})"


def hermitize(field: ScalarField, comps: np.ndarray) -> np.ndarray:
    """Mirror the upper triangle of (..., n, n, d) components into a self-adjoint array."""
    n = comps.shape[-2]
    out = np.zeros_like(comps)
    iu = np.triu_indices(n, 1)
    out[..., iu[0], iu[1], :] = comps[..., iu[0], iu[1], :]
    out[..., iu[1], iu[0], :] = comps[..., iu[0], iu[1], :] * field.conj_signs
    idx = np.arange(n)
    out[..., idx, idx, 0] = comps[..., idx, idx, 0]
    return out


def real_representation(field: ScalarField, comps: np.ndarray) -> np.ndarray:
    """Real (nd x nd) matrix of left multiplication; batched over leading axes."""
    n = comps.shape[-2]
    d = field.d
    rep = np.einsum('...ijc,cab->...iajb', comps, field.basis)
    return rep.reshape(comps.shape[:-3] + (n * d, n * d))


def embed_components(comps: np.ndarray) -> np.ndarray:
    """Quaternionic components (..., n, n, 4) to the complex [[alpha, beta], [-conj(beta), conj(alpha)]] form."""
    alpha = comps[..., 0] + 1j * comps[..., 1]
    beta = comps[..., 2] + 1j * comps[..., 3]
    top = np.concatenate([alpha, beta], axis=-1)
    bottom = np.concatenate([-beta.conj(), alpha.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def unembed_components(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[-1] // 2
    alpha = matrix[..., :n, :n]
    beta = matrix[..., :n, n:]
    return np.stack([alpha.real, alpha.imag, beta.real, beta.imag], axis=-1)


class StokesPoint:
    """Bloch-ball coordinates of a 2 x 2 state, D = 1/2 [[1 + x, y + i z], [y - i z, 1 - x]].

    A real state has z = None.
    """

    __slots__ = ('x', 'y', 'z')

    def __init__(self, x: float, y: float, z: Optional[float] = None):
        self.x = float(x)
        self.y = float(y)
        self.z = None if z is None else float(z)
        if self.r >= 1.0:
            raise DomainError(f"Stokes point must lie in the open unit ball, got r = {self.r!r}")

    def __repr__(self):
        if self.z is None:
            return f"StokesPoint(x={self.x}, y={self.y})"
        return f"StokesPoint(x={self.x}, y={self.y}, z={self.z})"

    @classmethod
    def from_state(cls, state: SelfAdjointState) -> StokesPoint:
        if state.n != 2 or state.field is ScalarField.quaternion:
            raise DomainError("Stokes coordinates exist for real and complex 2 x 2 states only")
        comps = state.matrix.components
        x = 2.0 * comps[0, 0, 0] - 1.0
        y = 2.0 * comps[0, 1, 0]
        if state.field is ScalarField.real:
            return cls(x, y)
        return cls(x, y, 2.0 * comps[0, 1, 1])

    @property
    def field(self) -> ScalarField:
        return ScalarField.real if self.z is None else ScalarField.complex

    @property
    def coordinates(self) -> np.ndarray:
        return np.array([self.x, self.y] if self.z is None else [self.x, self.y, self.z])

    @property
    def r(self) -> float:
        return math.sqrt(self.x ** 2 + self.y ** 2 + (self.z or 0.0) ** 2)

    @property
    def eigenvalues(self) -> tuple:
        return (1.0 + self.r) / 2, (1.0 - self.r) / 2

    def to_state(self) -> SelfAdjointState:
        comps = np.zeros((2, 2, self.field.d))
        comps[0, 0, 0] = (1.0 + self.x) / 2
        comps[1, 1, 0] = (1.0 - self.x) / 2
        comps[0, 1, 0] = self.y / 2
        if self.z is not None:
            comps[0, 1, 1] = self.z / 2
        return SelfAdjointState.from_matrix(SelfAdjointMatrix(self.field, comps))
