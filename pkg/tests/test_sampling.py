# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest
from scipy import stats

from utils.statespace.algebra import positive_definite_mask
from utils.statespace.errors import DomainError, EstimationError
from utils.statespace.metrics import monotone_functional, resolve_monotone
from utils.statespace.models import ScalarField, SelfAdjointState
from utils.statespace.qubit import qubit_volume_monotone
from utils.statespace.sampling import (
    RngStream, StateBatch, det_functional, estimate_functional_mc, estimate_volume_mc, flatten_samples, pointwise,
    run_streams, sample_columns, sample_state, sample_states, split_counts, unit_functional,
)
from utils.statespace.volumes import volume_lebesgue

KS_LEVEL = 0.01


def test_streams_are_reproducible():
    a = RngStream(7, 3).generator().standard_normal(5)
    b = RngStream(7, 3).generator().standard_normal(5)
    c = RngStream(7, 4).generator().standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_partition_gives_independent_substreams():
    parts = RngStream(11).partition(3)
    assert [p.path for p in parts] == [(0,), (1,), (2,)]
    draws = [p.generator().random() for p in parts]
    assert len(set(draws)) == 3


def test_stream_rejects_out_of_range_seed():
    with pytest.raises(DomainError):
        RngStream(-1)
    with pytest.raises(DomainError):
        RngStream(2 ** 64)


def test_split_counts():
    assert split_counts(10, 3) == [4, 3, 3]
    assert sum(split_counts(12345, 7)) == 12345


def test_run_streams_refuses_to_split_a_generator(rng):
    with pytest.raises(DomainError):
        run_streams(lambda g, count: count, rng, 100, 2)


@pytest.mark.parametrize("field", list(ScalarField))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_single_draw_is_a_state(rng, field, n):
    state = sample_state(field, n, rng)
    assert isinstance(state, SelfAdjointState)
    assert state.matrix.trace == pytest.approx(1.0, abs=1e-12)
    assert np.all(state.minors > 0)


@pytest.mark.parametrize("field", list(ScalarField))
@pytest.mark.parametrize("n", [2, 3, 5])
def test_batch_draws_are_states(rng, field, n):
    comps = sample_states(field, n, 2000, rng)
    assert comps.shape == (2000, n, n, field.d)
    assert np.allclose(comps[:, np.arange(n), np.arange(n), 0].sum(axis=1), 1.0)
    assert positive_definite_mask(field, comps).all()
    mirrored = np.swapaxes(comps, 1, 2) * field.conj_signs
    assert np.allclose(comps, mirrored)


def test_sampling_needs_two_by_two(rng):
    with pytest.raises(DomainError):
        sample_states(ScalarField.real, 1, 10, rng)


def test_batch_draws_are_seed_deterministic():
    a = sample_states(ScalarField.complex, 3, 50, RngStream(5))
    b = sample_states(ScalarField.complex, 3, 50, RngStream(5))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("field, n, shape", [
    (ScalarField.real, 3, (2, 4)),
    (ScalarField.complex, 2, (2, 2)),
    (ScalarField.complex, 3, (3, 6)),
])
def test_diagonal_marginals_are_dirichlet(rng, field, n, shape):
    comps = sample_states(field, n, 100_000, rng)
    for i in range(n):
        assert stats.kstest(comps[:, i, i, 0], "beta", args=shape).pvalue > KS_LEVEL


def test_real_off_diagonal_is_uniform_given_diagonal(rng):
    comps = sample_states(ScalarField.real, 2, 100_000, rng)
    scaled = comps[:, 0, 1, 0] / np.sqrt(comps[:, 0, 0, 0] * comps[:, 1, 1, 0])
    assert stats.kstest(scaled, "uniform", args=(-1, 2)).pvalue > KS_LEVEL


def test_real_three_column_radius_law(rng):
    # third column: r^2 ~ Beta(j d / 2, (n - 1 - j) d / 2 + 1) = Beta(1, 1)
    comps = sample_states(ScalarField.real, 3, 100_000, rng)
    a = comps[:, :2, :2, 0]
    x = comps[:, :2, 2, 0]
    det2 = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] ** 2
    quad = np.einsum('bi,bi->b', x, np.linalg.solve(a, x[..., None])[..., 0])
    r2 = quad / comps[:, 2, 2, 0]
    assert np.all(det2 > 0)
    assert stats.kstest(r2, "beta", args=(1, 1)).pvalue > KS_LEVEL


@pytest.mark.parametrize("field, expected", [(ScalarField.real, 1 / 8), (ScalarField.complex, 1 / 10)])
def test_expected_det_by_sampling(field, expected):
    result = estimate_functional_mc(field, 2, 400_000, det_functional, RngStream(3))
    assert abs(result.mean - expected) <= 3 * result.mean_std_error


def test_real_three_off_diagonal_given_diagonal(rng):
    # a_12 / sqrt(a_11 a_22) has density proportional to sqrt(1 - s^2)
    comps = sample_states(ScalarField.real, 3, 100_000, rng)
    s = comps[:, 0, 1, 0] / np.sqrt(comps[:, 0, 0, 0] * comps[:, 1, 1, 0])
    edges = np.linspace(-1.0, 1.0, 21)
    observed, _ = np.histogram(s, bins=edges)
    expected = np.diff(stats.semicircular.cdf(edges)) * len(s)
    assert stats.chisquare(observed, expected).pvalue > KS_LEVEL


@pytest.mark.parametrize("field", [ScalarField.real, ScalarField.complex])
@pytest.mark.parametrize("n", [4, 5])
def test_single_draws_survive_many_seeds(field, n):
    for seed in range(200):
        state = sample_state(field, n, RngStream(seed))
        assert np.all(state.minors > 0)


@pytest.mark.parametrize("field", [ScalarField.real, ScalarField.complex])
def test_rejection_estimate_two_by_two(field):
    result = estimate_volume_mc(field, 2, 400_000, RngStream(1))
    expected = volume_lebesgue(field, 2).value()
    assert result.within(expected)
    assert result.value == pytest.approx(expected, rel=0.01)
    assert result.n_accepted < result.n_samples


def test_rejection_estimate_is_reproducible_with_streams():
    a = estimate_volume_mc(ScalarField.complex, 2, 50_000, RngStream(9), threads=3, batch_size=4096)
    b = estimate_volume_mc(ScalarField.complex, 2, 50_000, RngStream(9), threads=3, batch_size=4096)
    assert a.n_accepted == b.n_accepted
    assert a.streams == 3


def test_estimates_refuse_small_sample_counts():
    with pytest.raises(DomainError):
        estimate_volume_mc(ScalarField.real, 2, 9_999, RngStream(1))
    with pytest.raises(DomainError):
        estimate_functional_mc(ScalarField.real, 2, 500, unit_functional, RngStream(1))


def test_unit_functional_returns_lebesgue_volume():
    result = estimate_functional_mc(ScalarField.quaternion, 2, 10_000, unit_functional, RngStream(2))
    assert result.value == pytest.approx(math.pi ** 2 / 60, rel=1e-12)
    assert result.std_error == 0.0


def test_pointwise_matches_batch_functional():
    comps = sample_states(ScalarField.complex, 3, 20, RngStream(4))
    batch = StateBatch(ScalarField.complex, comps)
    assert np.allclose(pointwise(lambda s: s.det)(batch), batch.det, rtol=1e-10)


def test_nonfinite_values_are_counted_and_flagged():

    def half_nan(batch):
        values = np.ones(len(batch))
        values[::2] = np.nan
        return values

    result = estimate_functional_mc(ScalarField.real, 2, 10_000, half_nan, RngStream(6))
    assert result.n_nonfinite == 5_000
    assert "nonfinite_excess" in result.flags
    assert result.mean == 1.0


def test_all_nonfinite_raises():
    with pytest.raises(EstimationError):
        estimate_functional_mc(ScalarField.real, 2, 10_000, lambda b: np.full(len(b), np.inf), RngStream(6))


@pytest.mark.parametrize("function_id, rel", [("sld", 0.02), ("km", 0.03), ("wy", 0.02)])
def test_metric_volume_by_sampling(function_id, rel):
    f = resolve_monotone(function_id)
    result = estimate_functional_mc(ScalarField.complex, 2, 400_000, monotone_functional(ScalarField.complex, f),
                                    RngStream(8))
    # the densities have infinite variance (log divergence at the boundary), so no sigma bound
    assert result.value == pytest.approx(qubit_volume_monotone(ScalarField.complex, f).value, rel=rel)


@pytest.mark.slow
@pytest.mark.parametrize("field, n", [
    (ScalarField.real, 2), (ScalarField.real, 3), (ScalarField.complex, 2), (ScalarField.quaternion, 2),
])
def test_rejection_volume_within_one_percent(field, n):
    result = estimate_volume_mc(field, n, 10_000_000, RngStream(0), threads=4)
    expected = volume_lebesgue(field, n).value()
    assert result.within(expected)
    assert result.value == pytest.approx(expected, rel=0.01)


@pytest.mark.slow
@pytest.mark.parametrize("field, n", [(ScalarField.real, 4), (ScalarField.complex, 3)])
def test_rejection_volume_larger_orders(field, n):
    result = estimate_volume_mc(field, n, 10_000_000, RngStream(0), threads=4)
    assert result.within(volume_lebesgue(field, n).value())


@pytest.mark.slow
@pytest.mark.parametrize("function_id", ["sld", "km", "wy"])
def test_metric_volume_by_sampling_tight(function_id):
    f = resolve_monotone(function_id)
    result = estimate_functional_mc(ScalarField.complex, 2, 10_000_000, monotone_functional(ScalarField.complex, f),
                                    RngStream(0), threads=4)
    assert result.within(qubit_volume_monotone(ScalarField.complex, f).value)


def test_sample_columns_and_flattening():
    assert sample_columns(ScalarField.complex, 2) == ["a_11", "a_22", "a_12_re", "a_12_im"]
    comps = sample_states(ScalarField.complex, 2, 3, RngStream(1))
    flat = flatten_samples(ScalarField.complex, comps)
    assert flat.shape == (3, 4)
    assert np.array_equal(flat[:, 2], comps[:, 0, 1, 0])
