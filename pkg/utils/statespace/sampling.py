# -*- coding: utf-8 -*-
from __future__ import annotations

import asyncio
import logging
import math
import time
from typing import Callable, List, Optional, Sequence, Union

import humanize
import numpy as np

from utils.statespace.algebra import batch_leading_minors, batch_eigenvalues, positive_definite_mask, sqrt_psd
from utils.statespace.errors import DomainError, EstimationError
from utils.statespace.models import (
    ScalarField, SelfAdjointMatrix, SelfAdjointState, hermitize, real_representation,
)
from utils.statespace.volumes import volume_lebesgue

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000
DEFAULT_BATCH_SIZE = 65536
NONFINITE_WARN_FRACTION = 1e-3
RADIUS_CLAMP = 1.0 - 1e-15
UINT64_MAX = 2 ** 64 - 1


class RngStream:
    """Counter-based stream (Philox) addressed by (seed, stream_id, substream path)."""

    __slots__ = ('seed', 'stream_id', 'path')

    algorithm = "philox"

    def __init__(self, seed: int, stream_id: int = 0, path: Sequence[int] = ()):
        for value in (seed, stream_id, *path):
            if not 0 <= int(value) <= UINT64_MAX:
                raise DomainError(f"seed and stream ids must be 64-bit unsigned integers, got {value!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.path = tuple(int(p) for p in path)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self.path)
        return np.random.Generator(np.random.Philox(seq))

    def partition(self, streams: int) -> List[RngStream]:
        if streams < 1:
            raise DomainError(f"stream count must be >= 1, got {streams}")
        return [RngStream(self.seed, self.stream_id, self.path + (s,)) for s in range(streams)]


RngLike = Union[RngStream, np.random.Generator, int]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return RngStream(int(rng)).generator()


class McEstimate:

    __slots__ = ('value', 'std_error', 'n_samples', 'n_accepted', 'mean', 'mean_std_error',
                 'n_nonfinite', 'flags', 'seed', 'streams')

    def __init__(self, value: float, std_error: float, n_samples: int, *, n_accepted: Optional[int] = None,
                 mean: Optional[float] = None, mean_std_error: Optional[float] = None, n_nonfinite: int = 0,
                 flags: Sequence[str] = (), seed: Optional[int] = None, streams: int = 1):
        self.value = value
        self.std_error = std_error
        self.n_samples = n_samples
        self.n_accepted = n_accepted
        self.mean = mean
        self.mean_std_error = mean_std_error
        self.n_nonfinite = n_nonfinite
        self.flags = list(flags)
        self.seed = seed
        self.streams = streams

    def __repr__(self):
        return f"McEstimate(value={self.value!r}, std_error={self.std_error!r}, n_samples={self.n_samples})"

    def within(self, target: float, sigmas: float = 3.0) -> bool:
        return abs(self.value - target) <= sigmas * self.std_error

    def to_dict(self) -> dict:
        data = {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
        }
        if self.n_accepted is not None:
            data["n_accepted"] = self.n_accepted
        if self.mean is not None:
            data["mean"] = self.mean
            data["mean_std_error"] = self.mean_std_error
            data["n_nonfinite"] = self.n_nonfinite
        data["flags"] = list(self.flags)
        data["seed"] = self.seed
        data["streams"] = self.streams
        return data


class StateBatch:
    """A stack of states sharing field and order; spectra and determinants are cached."""

    __slots__ = ('field', 'n', 'components', '_eigenvalues', '_det')

    def __init__(self, field: ScalarField, components: np.ndarray):
        self.field = field
        self.n = components.shape[1]
        self.components = components
        self._eigenvalues = None
        self._det = None

    def __len__(self):
        return self.components.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        if self._eigenvalues is None:
            self._eigenvalues = batch_eigenvalues(self.field, self.components)
        return self._eigenvalues

    @property
    def det(self) -> np.ndarray:
        if self._det is None:
            self._det = batch_leading_minors(self.field, self.components)[:, -1]
        return self._det

    def states(self):
        for comps in self.components:
            yield SelfAdjointState.from_matrix(SelfAdjointMatrix(self.field, comps))


BatchFunctional = Callable[[StateBatch], np.ndarray]


def pointwise(fn: Callable[[SelfAdjointState], float]) -> BatchFunctional:
    """Lift a per-state functional to a batch functional."""

    def wrapped(batch: StateBatch) -> np.ndarray:
        return np.array([fn(state) for state in batch.states()], dtype=float)

    return wrapped


def det_functional(batch: StateBatch) -> np.ndarray:
    return batch.det


def unit_functional(batch: StateBatch) -> np.ndarray:
    return np.ones(len(batch))


def _dirichlet_shape(field: ScalarField, n: int) -> float:
    return (n - 1) * field.d / 2 + 1


def _check_order(n: int):
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"sampling needs n >= 2, got {n!r}")


def sample_state(field: ScalarField, n: int, rng: RngLike) -> SelfAdjointState:
    """One exact draw from the normalized Lebesgue measure, column by column."""
    field = ScalarField.parse(field)
    _check_order(n)
    g = as_generator(rng)
    d = field.d

    diag = g.dirichlet(np.full(n, _dirichlet_shape(field, n)))
    comps = np.zeros((n, n, d))
    comps[np.arange(n), np.arange(n), 0] = diag
    det = diag[0]

    for j in range(1, n):
        m = j * d
        u = g.standard_normal(m)
        u /= np.linalg.norm(u)
        r = min(math.sqrt(g.beta(m / 2, (n - 1 - j) * d / 2 + 1)), RADIUS_CLAMP)
        rho = diag[j] * det
        root = sqrt_psd(SelfAdjointMatrix(field, comps[:j, :j])).real_representation()
        x = math.sqrt(rho / det) * r * (root @ u)
        comps[:j, j, :] = x.reshape(j, d)
        det = rho * (1.0 - r * r)

    return SelfAdjointState.from_matrix(SelfAdjointMatrix(field, comps))


def sample_states(field: ScalarField, n: int, count: int, rng: RngLike) -> np.ndarray:
    """Vectorized exact draws, returned as components of shape (count, n, n, d).

    Each column uses a Cholesky factor of the real representation of A_j; any factor S
    with S S* = A_j gives the same law because the direction u is rotation invariant.
    """
    field = ScalarField.parse(field)
    _check_order(n)
    g = as_generator(rng)
    d = field.d

    diag = g.dirichlet(np.full(n, _dirichlet_shape(field, n)), size=count)
    comps = np.zeros((count, n, n, d))
    comps[:, np.arange(n), np.arange(n), 0] = diag
    det = diag[:, 0].copy()

    for j in range(1, n):
        m = j * d
        u = g.standard_normal((count, m))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        r = np.minimum(np.sqrt(g.beta(m / 2, (n - 1 - j) * d / 2 + 1, size=count)), RADIUS_CLAMP)
        rho = diag[:, j] * det
        chol = np.linalg.cholesky(real_representation(field, comps[:, :j, :j]))
        x = (np.sqrt(rho / det) * r)[:, None] * np.einsum('bij,bj->bi', chol, u)
        x = x.reshape(count, j, d)
        comps[:, :j, j, :] = x
        comps[:, j, :j, :] = x * field.conj_signs
        det = rho * (1.0 - r * r)

    return comps


def _box_batch(field: ScalarField, n: int, count: int, g: np.random.Generator) -> np.ndarray:
    diag = g.dirichlet(np.ones(n), size=count)
    comps = np.zeros((count, n, n, field.d))
    iu = np.triu_indices(n, 1)
    comps[:, iu[0], iu[1], :] = g.uniform(-0.5, 0.5, size=(count, len(iu[0]), field.d))
    comps[:, np.arange(n), np.arange(n), 0] = diag
    return hermitize(field, comps)


def split_counts(total: int, streams: int) -> List[int]:
    base, extra = divmod(total, streams)
    return [base + (1 if s < extra else 0) for s in range(streams)]


async def _gather_streams(worker, jobs):
    return await asyncio.gather(*[asyncio.to_thread(worker, *job) for job in jobs])


def run_streams(worker: Callable, rng: RngLike, total: int, threads: int) -> list:
    """Run ``worker(generator, count)`` on every stream; results come back in stream order."""
    if isinstance(rng, np.random.Generator):
        if threads != 1:
            raise DomainError("a bare numpy Generator cannot be split; pass an RngStream or seed")
        return [worker(rng, total)]

    base = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    jobs = [(stream.generator(), count) for stream, count in zip(base.partition(threads), split_counts(total, threads))]

    if threads == 1:
        return [worker(*jobs[0])]

    return asyncio.run(_gather_streams(worker, jobs))


def _seed_of(rng: RngLike) -> Optional[int]:
    if isinstance(rng, RngStream):
        return rng.seed
    if isinstance(rng, np.random.Generator):
        return None
    return int(rng)


def estimate_volume_mc(field: ScalarField, n: int, n_samples: int, rng: RngLike, *, threads: int = 1,
                       batch_size: int = DEFAULT_BATCH_SIZE) -> McEstimate:
    """Rejection estimate over the box simplex x [-1/2, 1/2]^(off-diagonal components)."""
    field = ScalarField.parse(field)
    _check_order(n)
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"rejection estimate needs at least {MIN_SAMPLES} samples, got {n_samples}")

    def worker(g: np.random.Generator, count: int) -> int:
        started = time.perf_counter()
        accepted = 0
        done = 0
        while done < count:
            b = min(batch_size, count - done)
            accepted += int(np.count_nonzero(positive_definite_mask(field, _box_batch(field, n, b, g))))
            done += b
        logger.debug("rejection stream: %s samples in %s", humanize.intcomma(count),
                     humanize.naturaldelta(time.perf_counter() - started))
        return accepted

    accepted = sum(run_streams(worker, rng, n_samples, threads))

    if not accepted:
        raise EstimationError(f"no sample out of {n_samples} was accepted; increase the number of samples")

    box = 1.0 / math.factorial(n - 1)
    p = accepted / n_samples

    return McEstimate(
        value=p * box,
        std_error=math.sqrt(p * (1.0 - p) / n_samples) * box,
        n_samples=n_samples,
        n_accepted=accepted,
        seed=_seed_of(rng),
        streams=threads,
    )


def _merge_moments(parts: Sequence[tuple]) -> tuple:
    """Chan's pairwise merge of (count, mean, M2) triples, in the given order."""
    count, mean, m2 = 0, 0.0, 0.0
    for c, mu, s in parts:
        if not c:
            continue
        total = count + c
        delta = mu - mean
        mean += delta * c / total
        m2 += s + delta * delta * count * c / total
        count = total
    return count, mean, m2


def estimate_functional_mc(field: ScalarField, n: int, n_samples: int, functional: BatchFunctional,
                           rng: RngLike, *, threads: int = 1, batch_size: int = DEFAULT_BATCH_SIZE,
                           nonfinite_warn_fraction: float = NONFINITE_WARN_FRACTION) -> McEstimate:
    """Mean of a functional over exact uniform draws; ``value`` is the integral mean * V_Lebesgue."""
    field = ScalarField.parse(field)
    _check_order(n)
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"functional estimate needs at least {MIN_SAMPLES} samples, got {n_samples}")

    def worker(g: np.random.Generator, count: int) -> tuple:
        started = time.perf_counter()
        parts = []
        nonfinite = 0
        done = 0
        while done < count:
            b = min(batch_size, count - done)
            values = np.asarray(functional(StateBatch(field, sample_states(field, n, b, g))), dtype=float)
            finite = values[np.isfinite(values)]
            nonfinite += b - finite.size
            if finite.size:
                mu = float(finite.mean())
                parts.append((finite.size, mu, float(np.sum((finite - mu) ** 2))))
            done += b
        logger.debug("functional stream: %s samples in %s", humanize.intcomma(count),
                     humanize.naturaldelta(time.perf_counter() - started))
        return _merge_moments(parts), nonfinite

    results = run_streams(worker, rng, n_samples, threads)
    count, mean, m2 = _merge_moments([r[0] for r in results])
    nonfinite = sum(r[1] for r in results)

    if count < 2:
        raise EstimationError(f"functional was finite at {count} of {n_samples} samples")

    flags = []
    if nonfinite > nonfinite_warn_fraction * n_samples:
        flags.append("nonfinite_excess")
        logger.warning("functional was not finite at %s of %s samples", humanize.intcomma(nonfinite),
                       humanize.intcomma(n_samples))

    mean_se = math.sqrt(m2 / (count - 1) / count)
    volume = volume_lebesgue(field, n).value()

    return McEstimate(
        value=mean * volume,
        std_error=mean_se * volume,
        n_samples=n_samples,
        mean=mean,
        mean_std_error=mean_se,
        n_nonfinite=nonfinite,
        flags=flags,
        seed=_seed_of(rng),
        streams=threads,
    )


def sample_columns(field: ScalarField, n: int) -> List[str]:
    """CSV header: diagonal first, then upper-triangle entries expanded to real components."""
    field = ScalarField.parse(field)
    columns = [f"a_{i}{i}" for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if field is ScalarField.real:
                columns.append(f"a_{i}{j}")
            else:
                columns.extend(f"a_{i}{j}_{c}" for c in field.component_names)
    return columns


def flatten_samples(field: ScalarField, comps: np.ndarray) -> np.ndarray:
    n = comps.shape[1]
    iu = np.triu_indices(n, 1)
    diag = comps[:, np.arange(n), np.arange(n), 0]
    off = comps[:, iu[0], iu[1], :].reshape(comps.shape[0], -1)
    return np.concatenate([diag, off], axis=1)


def nested_samples(field: ScalarField, comps: np.ndarray) -> list:
    """Per-state n x n nested lists; entries are numbers (real) or component lists."""
    if field is ScalarField.real:
        return comps[..., 0].tolist()
    return comps.tolist()
