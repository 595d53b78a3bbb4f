# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import math
from typing import Sequence, Tuple

import numpy as np

from utils.statespace.errors import ConvergenceError, DomainError, SingularMinorError
from utils.statespace.models import (
    ScalarField, SelfAdjointMatrix, embed_components, real_representation, unembed_components,
)

logger = logging.getLogger(__name__)

OFFDIAG_TOLERANCE = 1e-13
MAX_SWEEPS = 100
RESIDUAL_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
ADJUGATE_MAX_ORDER = 4
SINGULAR_RELATIVE = 1e-14


def cofactor_determinant(matrix: np.ndarray):
    """Laplace expansion along the first row. Real or complex input, small orders only."""
    m = np.asarray(matrix)
    n = m.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return m[0, 0]
    if n == 2:
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    total = 0
    for j in range(n):
        if m[0, j] == 0:
            continue
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_determinant(minor)
    return total


def adjugate(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix)
    n = m.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=m.dtype)
    adj = np.empty_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            adj[j, i] = (-1) ** (i + j) * cofactor_determinant(minor)
    return adj


def _schur_form(matrix: SelfAdjointMatrix, k: int, prev_det: float) -> float:
    """<x, T x> for the last column x of A_k, with T = det(A_{k-1}) * inverse(A_{k-1})."""
    comps = matrix.components
    if matrix.field is not ScalarField.quaternion and k - 1 <= ADJUGATE_MAX_ORDER:
        block = matrix.leading(k - 1).to_numpy()
        x = matrix.leading(k).to_numpy()[:k - 1, k - 1]
        return float(np.real(np.conj(x) @ adjugate(block) @ x))
    rep = real_representation(matrix.field, comps[:k - 1, :k - 1])
    y = comps[:k - 1, k - 1, :].reshape(-1)
    return float(prev_det * (y @ np.linalg.solve(rep, y)))


def leading_minor_determinants(matrix: SelfAdjointMatrix, *, stop_on_nonpositive: bool = False) -> np.ndarray:
    """det A_1, ..., det A_n through det A_k = a_kk det A_{k-1} - <x, T x>.

    For quaternionic input the values are Moore determinants (their squares are the
    determinants of the complex embedding). With ``stop_on_nonpositive`` the sequence
    is cut after the first value that is not strictly positive.
    """
    comps = matrix.components
    n = matrix.n
    scale = max(float(np.abs(comps).max(initial=0.0)), np.finfo(float).tiny)
    dets = [float(comps[0, 0, 0])]

    for k in range(2, n + 1):
        prev = dets[-1]
        if stop_on_nonpositive and prev <= 0.0:
            break
        if not math.isfinite(prev) or abs(prev) <= SINGULAR_RELATIVE * scale ** (k - 1):
            raise SingularMinorError(k - 1, prev)
        q = _schur_form(matrix, k, prev)
        dets.append(float(comps[k - 1, k - 1, 0]) * prev - q)

    return np.array(dets)


def is_positive_definite(matrix: SelfAdjointMatrix) -> bool:
    try:
        minors = leading_minor_determinants(matrix, stop_on_nonpositive=True)
    except SingularMinorError:
        return False
    return len(minors) == matrix.n and bool(np.all(minors > 0.0))


def det_diag_plus_constant(x: float, diag: Sequence[float]) -> float:
    """det(x * ones + diag(b)) = prod(b) + x * sum_i prod_{j != i} b_j."""
    diag = [float(b) for b in diag]
    cofactors = 0.0
    for i in range(len(diag)):
        p = 1.0
        for j, b in enumerate(diag):
            if j != i:
                p *= b
        cofactors += p
    return math.prod(diag) + x * cofactors


def _off_norm(a: np.ndarray) -> float:
    """Frobenius norm of the strict off-diagonal part, summed entry by entry."""
    upper = a[np.triu_indices(a.shape[0], 1)]
    return math.sqrt(2.0) * float(np.linalg.norm(upper))


def jacobi_eigh(matrix: np.ndarray, *, tol: float = OFFDIAG_TOLERANCE,
                max_sweeps: int = MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations for a real symmetric or complex Hermitian matrix.

    Each rotation first removes the phase of a_pq with diag(1, e^{-i phi}), then applies
    a real Givens rotation. Returns ascending eigenvalues and column eigenvectors.
    """
    a = np.array(matrix, dtype=complex if np.iscomplexobj(matrix) else float)
    n = a.shape[0]
    v = np.eye(n, dtype=a.dtype)
    scale = max(1.0, float(np.linalg.norm(a)))
    sweeps = 0

    while _off_norm(a) > tol * scale:
        if sweeps >= max_sweeps:
            raise ConvergenceError("Jacobi iteration did not converge", residual=_off_norm(a), sweeps=sweeps)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                r = abs(b)
                if r == 0.0:
                    continue
                phase = np.conj(b / r)
                theta = 0.5 * math.atan2(2.0 * r, float(np.real(a[q, q] - a[p, p])))
                c, s = math.cos(theta), math.sin(theta)
                u = np.array([[c, s], [-s * phase, c * phase]], dtype=a.dtype)
                cols = [p, q]
                a[:, cols] = a[:, cols] @ u
                a[cols, :] = u.conj().T @ a[cols, :]
                a[p, q] = a[q, p] = 0.0
                v[:, cols] = v[:, cols] @ u

    values = np.real(np.diag(a))
    order = np.argsort(values)
    return values[order], v[:, order]


def _checked_eigh(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    values, vectors = jacobi_eigh(m)
    residual = float(np.abs(m @ vectors - vectors * values).max(initial=0.0))
    if residual > RESIDUAL_TOLERANCE * max(1.0, float(np.abs(m).max(initial=0.0))):
        raise ConvergenceError("eigenpair reconstruction failed", residual=residual)
    return values, vectors


def eigenvalues_self_adjoint(matrix: SelfAdjointMatrix) -> np.ndarray:
    values, _ = _checked_eigh(matrix.to_numpy())
    if matrix.field is ScalarField.quaternion:
        # the embedding doubles every eigenvalue
        values = values[::2]
    return values


def sqrt_psd(matrix: SelfAdjointMatrix) -> SelfAdjointMatrix:
    m = matrix.to_numpy()
    values, vectors = _checked_eigh(m)
    if values[0] < -PSD_TOLERANCE:
        raise DomainError(f"matrix is not positive semidefinite (eigenvalue {values[0]:.3e})")
    root = (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T
    if matrix.field is ScalarField.quaternion:
        return SelfAdjointMatrix(ScalarField.quaternion, unembed_components(root))
    return SelfAdjointMatrix.from_array(root if matrix.field is ScalarField.complex else root.real,
                                        field=matrix.field)


def embed_complex(matrix: SelfAdjointMatrix) -> SelfAdjointMatrix:
    if matrix.field is not ScalarField.quaternion:
        raise DomainError("embed_complex expects a quaternionic matrix")
    return SelfAdjointMatrix.from_array(embed_components(matrix.components), field=ScalarField.complex)


def qdet(matrix: SelfAdjointMatrix) -> float:
    """Moore determinant of a quaternionic Hermitian matrix; qdet(A)^2 = det(embed_complex(A))."""
    if matrix.field is not ScalarField.quaternion:
        raise DomainError("qdet expects a quaternionic matrix")
    try:
        return float(leading_minor_determinants(matrix)[-1])
    except SingularMinorError:
        det = np.linalg.det(embed_components(matrix.components))
        return math.sqrt(max(float(np.real(det)), 0.0))


def batch_leading_minors(field: ScalarField, comps: np.ndarray, *, mask: bool = False) -> np.ndarray:
    """Leading minors for a stack (batch, n, n, d) of self-adjoint components.

    With ``mask`` the recursion drops each matrix as soon as a minor is not positive
    and the return value is the boolean positive-definite mask.
    """
    batch, n = comps.shape[0], comps.shape[1]
    dets = np.full((batch, n), np.nan)
    dets[:, 0] = comps[:, 0, 0, 0]
    alive = dets[:, 0] > 0.0

    for k in range(2, n + 1):
        idx = np.nonzero(alive)[0] if mask else np.arange(batch)
        if idx.size == 0:
            break
        sub = comps[idx]
        rep = real_representation(field, sub[:, :k - 1, :k - 1])
        y = sub[:, :k - 1, k - 1, :].reshape(idx.size, -1)
        quad = np.einsum('bi,bi->b', y, np.linalg.solve(rep, y[..., None])[..., 0])
        dets[idx, k - 1] = dets[idx, k - 2] * (sub[:, k - 1, k - 1, 0] - quad)
        alive[idx] = dets[idx, k - 1] > 0.0

    return alive if mask else dets


def positive_definite_mask(field: ScalarField, comps: np.ndarray) -> np.ndarray:
    return batch_leading_minors(field, comps, mask=True)


def batch_eigenvalues(field: ScalarField, comps: np.ndarray) -> np.ndarray:
    """Ascending spectra for a stack of self-adjoint components (vectorized LAPACK path)."""
    if field is ScalarField.real:
        return np.linalg.eigvalsh(comps[..., 0])
    if field is ScalarField.complex:
        return np.linalg.eigvalsh(comps[..., 0] + 1j * comps[..., 1])
    return np.linalg.eigvalsh(embed_components(comps))[..., ::2]
