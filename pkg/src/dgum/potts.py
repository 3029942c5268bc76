"""Potts MRF samplers: sequential and chromatic Gibbs, with the empirical stopping rule."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator
from typing import Final

import numpy as np

from .const import (
    DEFAULT_MAX_ITERS,
    DOMAIN,
    STREAM_GIBBS_INIT,
    STREAM_GIBBS_SWEEP,
)
from .exceptions import InvalidArgumentError
from .lattice import color_grid, is_valid_coloring, neighbor_table, neighbor_views
from .rng import generator
from .types import (
    ConvergenceState,
    GibbsResult,
    GridShape,
    LabelField,
    PottsSpec,
    RngSeed,
)
from .utils import draw_categorical

_LOGGER: Final = logging.getLogger(__name__)

# Exhaustive enumeration is limited to tiny tori.
BOLTZMANN_MAX_SITES: Final = 16


def _probabilities(counts: np.ndarray, spec: PottsSpec) -> np.ndarray:
    """Normalize exp(+/- beta * counts) along axis 0."""
    sign = 1.0 if spec.attractive else -1.0
    logits = sign * spec.beta * counts
    logits -= logits.max(axis=0, keepdims=True)
    weights = np.exp(logits)
    return weights / weights.sum(axis=0, keepdims=True)


def conditional_distribution(x: LabelField, s: int, spec: PottsSpec) -> np.ndarray:
    """p(x_s = k | neighbors) for k = 0..K-1; labels are class indices."""
    table = neighbor_table(x.shape, spec.system)
    row = table[x.shape.index(*x.shape.coords(s))]
    values = x.labels.ravel()[row]
    counts = np.array([np.count_nonzero(values == k) for k in range(spec.K)])
    return _probabilities(counts.astype(np.float64), spec)


def _field_counts(x: np.ndarray, spec: PottsSpec) -> np.ndarray:
    """Same-class neighbor counts for every class, shape (K, *x.shape)."""
    counts = np.zeros((spec.K, *x.shape))
    for view in neighbor_views(x, spec.system):
        for k in range(spec.K):
            counts[k] += view == k
    return counts


def iter_gibbs_sweeps(
    shape: GridShape,
    spec: PottsSpec,
    seed: RngSeed,
    sweeps: int,
    chains: int = 1,
    chromatic: bool = False,
) -> Iterator[np.ndarray]:
    """Yield the (chains, height, width) class-index state after each sweep.

    Chains start from i.i.d. uniform labels. The update of site s of chain c
    at sweep t uses the uniform variate keyed by (seed, t, c, s), so a
    sequential and a chromatic run consume the same variates and every run is
    reproducible whatever the thread schedule.
    """
    if sweeps < 1 or chains < 1:
        raise InvalidArgumentError("sweeps and chains must be positive")
    x = generator(seed, STREAM_GIBBS_INIT).integers(
        0, spec.K, size=(chains, *shape.dims)
    )
    if chromatic:
        coloring = color_grid(shape, spec.system)
        if not is_valid_coloring(coloring):
            raise InvalidArgumentError(f"invalid coloring for {shape}")
        masks = coloring.masks()
        _LOGGER.debug(
            "%s - iter_gibbs_sweeps: chromatic with %s colors",
            DOMAIN,
            coloring.num_colors,
        )
    else:
        table = neighbor_table(shape, spec.system)
        classes = np.arange(spec.K)[:, np.newaxis, np.newaxis]

    for t in range(sweeps):
        u = generator(seed, STREAM_GIBBS_SWEEP, t).random((chains, *shape.dims))
        if chromatic:
            for mask in masks:
                probs = _probabilities(_field_counts(x, spec), spec)
                x = np.where(mask, draw_categorical(probs, u), x)
        else:
            flat = x.reshape(chains, shape.n)
            uflat = u.reshape(chains, shape.n)
            for s in range(shape.n):
                counts = np.sum(flat[np.newaxis, :, table[s]] == classes, axis=2)
                probs = _probabilities(counts.astype(np.float64), spec)
                flat[:, s] = draw_categorical(probs, uflat[:, s])
        yield x.copy()


def convergence_check(state: ConvergenceState, current: LabelField) -> bool:
    """Stop when < threshold of the sites differ from their recent majority.

    The majority is taken per site over the previous `window` fields; the
    current field is appended to the history afterwards.
    """
    converged = False
    if len(state.history) >= state.window:
        stack = np.stack(state.history)
        values = np.unique(stack)
        votes = np.sum(stack[np.newaxis] == values[:, None, None, None], axis=1)
        majority = values[np.argmax(votes, axis=0)]
        changed = float(np.mean(current.labels != majority))
        converged = changed < state.threshold
    state.history.append(np.array(current.labels, copy=True))
    return converged


def _run(
    shape: GridShape,
    spec: PottsSpec,
    seed: RngSeed,
    max_iters: int,
    chromatic: bool,
) -> GibbsResult:
    if max_iters < 1:
        raise InvalidArgumentError(f"max_iters must be positive, got {max_iters}")
    state = ConvergenceState()
    field = None
    for iteration, x in enumerate(
        iter_gibbs_sweeps(shape, spec, seed, max_iters, chromatic=chromatic), start=1
    ):
        field = LabelField(shape, x[0])
        if convergence_check(state, field):
            _LOGGER.debug(
                "%s - gibbs: converged after %s sweeps", DOMAIN, iteration
            )
            return GibbsResult(field, iteration, True)
    _LOGGER.warning(
        "%s - gibbs: no convergence within %s sweeps (K=%s, beta=%s)",
        DOMAIN,
        max_iters,
        spec.K,
        spec.beta,
    )
    return GibbsResult(field, max_iters, False)


def gibbs_sample(
    shape: GridShape,
    spec: PottsSpec,
    seed: RngSeed,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> GibbsResult:
    """Sequential raster-order Gibbs sampling until convergence or max_iters."""
    return _run(shape, spec, seed, max_iters, chromatic=False)


def chromatic_gibbs_sample(
    shape: GridShape,
    spec: PottsSpec,
    seed: RngSeed,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> GibbsResult:
    """Chromatic Gibbs sampling: one simultaneous update per color class."""
    return _run(shape, spec, seed, max_iters, chromatic=True)


def configuration_index(labels: np.ndarray, K: int) -> np.ndarray:
    """Enumeration index of row-major class-index configurations.

    The first site is the most significant digit, matching
    boltzmann_distribution. The last axis holds the n sites.
    """
    n = labels.shape[-1]
    powers = K ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return labels.astype(np.int64) @ powers


def boltzmann_distribution(shape: GridShape, spec: PottsSpec) -> np.ndarray:
    """Exact Potts probabilities of all K^n configurations of a tiny torus."""
    if shape.n > BOLTZMANN_MAX_SITES:
        raise InvalidArgumentError(
            f"exhaustive enumeration supports at most {BOLTZMANN_MAX_SITES} sites"
        )
    configs = np.array(list(itertools.product(range(spec.K), repeat=shape.n)))
    table = neighbor_table(shape, spec.system)
    # Each unordered edge appears twice in the neighbor lists.
    agreements = np.sum(configs[:, :, np.newaxis] == configs[:, table], axis=(1, 2)) / 2
    sign = 1.0 if spec.attractive else -1.0
    logp = sign * spec.beta * agreements
    weights = np.exp(logp - logp.max())
    return weights / weights.sum()
