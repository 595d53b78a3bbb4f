# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from tests.conftest import random_positive_definite
from utils.statespace.algebra import (
    batch_eigenvalues, batch_leading_minors, cofactor_determinant, det_diag_plus_constant, eigenvalues_self_adjoint,
    embed_complex, is_positive_definite, jacobi_eigh, leading_minor_determinants, positive_definite_mask, qdet,
    sqrt_psd,
)
from utils.statespace.errors import ConvergenceError, DomainError, SingularMinorError
from utils.statespace.models import Quaternion, ScalarField, SelfAdjointMatrix, real_representation


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cofactor_matches_numpy(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert np.isclose(cofactor_determinant(m), np.linalg.det(m), rtol=1e-10)


@pytest.mark.parametrize("field", [ScalarField.real, ScalarField.complex])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_leading_minors_match_cofactor_oracle(rng, field, n):
    a = random_positive_definite(field, n, rng)
    minors = leading_minor_determinants(a)
    full = a.to_numpy()
    for k in range(1, n + 1):
        oracle = np.real(cofactor_determinant(full[:k, :k]))
        assert minors[k - 1] == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_quaternion_minors_square_to_embedding_det(rng, n):
    a = random_positive_definite(ScalarField.quaternion, n, rng)
    minors = leading_minor_determinants(a)
    for k in range(1, n + 1):
        embedded = np.real(np.linalg.det(embed_complex(a.leading(k)).to_numpy()))
        assert minors[k - 1] > 0
        assert minors[k - 1] ** 2 == pytest.approx(embedded, rel=1e-10)


def test_quaternion_two_by_two_by_hand():
    q = Quaternion(0.1, 0.2, -0.1, 0.05)
    a = SelfAdjointMatrix.from_quaternions([[0.6, q], [q.conjugate(), 0.4]])
    assert qdet(a) == pytest.approx(0.24 - q.norm() ** 2, rel=1e-12)


def test_singular_leading_minor_raises():
    a = SelfAdjointMatrix.from_array(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(SingularMinorError) as info:
        leading_minor_determinants(a)
    assert info.value.k == 1


def test_positive_definite_checks():
    assert is_positive_definite(SelfAdjointMatrix.diagonal(ScalarField.complex, [0.2, 0.3, 0.5]))
    assert not is_positive_definite(SelfAdjointMatrix.from_array(np.array([[0.5, 0.6], [0.6, 0.5]])))
    assert not is_positive_definite(SelfAdjointMatrix.from_array(np.array([[0.0, 0.1], [0.1, 1.0]])))


def test_batch_minors_agree_with_single(rng):
    mats = [random_positive_definite(ScalarField.quaternion, 3, rng) for _ in range(5)]
    comps = np.stack([m.components for m in mats])
    batch = batch_leading_minors(ScalarField.quaternion, comps)
    for row, m in zip(batch, mats):
        assert np.allclose(row, leading_minor_determinants(m), rtol=1e-10)
    assert positive_definite_mask(ScalarField.quaternion, comps).all()
    assert not positive_definite_mask(ScalarField.quaternion, -comps).any()


def test_det_diag_plus_constant_matches_cofactor():
    x, diag = 0.7, (1.0, 2.0, 3.0)
    full = x * np.ones((3, 3)) + np.diag(diag)
    assert det_diag_plus_constant(x, diag) == pytest.approx(cofactor_determinant(full), rel=1e-14)


@pytest.mark.parametrize("complex_input", [False, True])
def test_jacobi_matches_numpy(rng, complex_input):
    b = rng.standard_normal((5, 5))
    if complex_input:
        b = b + 1j * rng.standard_normal((5, 5))
    m = b + b.conj().T
    values, vectors = jacobi_eigh(m)
    assert np.allclose(values, np.linalg.eigvalsh(m), atol=1e-10)
    assert np.allclose(m @ vectors, vectors * values, atol=1e-9)
    assert np.allclose(vectors.conj().T @ vectors, np.eye(5), atol=1e-10)


def test_jacobi_eigenvalues_are_characteristic_roots(rng):
    b = rng.standard_normal((5, 5))
    m = b + b.T
    values, _ = jacobi_eigh(m)
    for v in values:
        assert abs(np.linalg.det(m - v * np.eye(5))) < 1e-8 * max(1.0, np.abs(m).max() ** 5)


def test_jacobi_sweep_cap_raises():
    with pytest.raises(ConvergenceError):
        jacobi_eigh(np.array([[1.0, 0.5], [0.5, 2.0]]), max_sweeps=0)


def test_quaternion_spectrum_is_not_doubled(rng):
    a = random_positive_definite(ScalarField.quaternion, 3, rng)
    values = eigenvalues_self_adjoint(a)
    assert values.shape == (3,)
    assert values.sum() == pytest.approx(a.trace, rel=1e-12)
    assert np.allclose(values, batch_eigenvalues(ScalarField.quaternion, a.components[None])[0], rtol=1e-10)
    assert math.prod(values) == pytest.approx(qdet(a), rel=1e-10)


@pytest.mark.parametrize("field", list(ScalarField))
def test_sqrt_psd_squares_back(rng, field):
    a = random_positive_definite(field, 3, rng)
    root = sqrt_psd(a)
    r = real_representation(field, root.components)
    assert np.allclose(r @ r, a.real_representation(), atol=1e-9)


def test_sqrt_psd_rejects_indefinite():
    with pytest.raises(DomainError):
        sqrt_psd(SelfAdjointMatrix.diagonal(ScalarField.real, [1.0, -0.5]))


def test_embed_complex_needs_quaternions():
    with pytest.raises(DomainError):
        embed_complex(SelfAdjointMatrix.identity(ScalarField.complex, 2))


def _shifted_self_adjoint(field, n, g):
    """Random self-adjoint matrix whose smallest eigenvalue straddles zero."""
    a = random_positive_definite(field, n, g)
    spectrum = np.linalg.eigvalsh(a.real_representation())
    comps = a.components.copy()
    idx = np.arange(n)
    comps[idx, idx, 0] -= spectrum[0] + g.uniform(-1.0, 1.0)
    return SelfAdjointMatrix(field, comps)


@pytest.mark.parametrize("field", list(ScalarField))
def test_positive_definite_agrees_with_spectrum(rng, field):
    agreed = 0
    for i in range(1000):
        a = _shifted_self_adjoint(field, 2 + i % 4, rng)
        smallest = np.linalg.eigvalsh(a.real_representation())[0]
        if abs(smallest) < 1e-9:
            continue
        assert is_positive_definite(a) == (smallest > 0), a.components
        agreed += 1
    assert agreed > 990


@pytest.mark.parametrize("complex_input", [False, True])
@pytest.mark.parametrize("n", [4, 5])
def test_jacobi_on_many_random_matrices(rng, n, complex_input):
    for _ in range(300):
        b = rng.standard_normal((n, n))
        if complex_input:
            b = b + 1j * rng.standard_normal((n, n))
        m = b + b.conj().T
        values, vectors = jacobi_eigh(m)
        assert np.allclose(values, np.linalg.eigvalsh(m), atol=1e-10)
        assert np.abs(m @ vectors - vectors * values).max() <= 1e-10 * max(1.0, np.abs(m).max())


@pytest.mark.parametrize("field", list(ScalarField))
@pytest.mark.parametrize("n", [3, 4, 5])
def test_sqrt_psd_on_many_random_states(rng, field, n):
    for _ in range(100):
        a = random_positive_definite(field, n, rng)
        a = SelfAdjointMatrix(field, a.components / a.trace)
        r = real_representation(field, sqrt_psd(a).components)
        assert np.abs(r @ r - a.real_representation()).max() <= 1e-10
        oracle = np.linalg.eigvalsh(a.to_numpy())
        if field is ScalarField.quaternion:
            oracle = oracle[::2]
        assert np.allclose(eigenvalues_self_adjoint(a), oracle, atol=1e-12)
