"""Tests for dgum.gum."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from dgum.exceptions import InvalidArgumentError
from dgum.gmrf import sample_multivariate
from dgum.gum import (
    dgum_field,
    gum_field,
    pi_map,
    sample_dgum,
    sample_labels_from_pi,
    simplex_vertices,
)
from dgum.stats import class_frequencies, neighbor_agreement
from dgum.types import (
    ClassSet,
    CovarianceSpec,
    GridShape,
    MultivariateGmrfSpec,
    RealFieldStack,
    SimplexVertices,
)


def _constant_stack(point, shape=GridShape(2, 3)) -> RealFieldStack:
    point = np.asarray(point, dtype=float)
    values = np.broadcast_to(point[:, None, None], (point.size, *shape.dims))
    return RealFieldStack(shape, values.copy())


def _random_stack(P: int, seed: int = 0, shape=GridShape(8, 8)) -> RealFieldStack:
    values = np.random.default_rng(seed).normal(size=(P, *shape.dims))
    return RealFieldStack(shape, values)


@pytest.mark.parametrize("P", range(1, 11))
def test_simplex_vertices_are_unit_equidistant_and_centered(P):
    v = simplex_vertices(P).vertices
    assert v.shape == (P + 1, P)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(v.sum(axis=0), 0.0, atol=1e-12)
    expected = math.sqrt(2 + 2 / P)
    for a, b in itertools.combinations(range(P + 1), 2):
        assert np.linalg.norm(v[a] - v[b]) == pytest.approx(expected, abs=1e-12)


def test_simplex_in_one_dimension():
    np.testing.assert_allclose(simplex_vertices(1).vertices, [[1.0], [-1.0]])


def test_simplex_in_two_dimensions():
    np.testing.assert_allclose(
        simplex_vertices(2).vertices,
        [[0.96593, -0.25882], [-0.25882, 0.96593], [-0.70711, -0.70711]],
        atol=1e-5,
    )


@pytest.mark.parametrize("P", [0, -2, 1.5])
def test_simplex_rejects_bad_dimension(P):
    with pytest.raises(InvalidArgumentError):
        simplex_vertices(P)


@pytest.mark.parametrize("K", [2, 3, 5])
def test_pi_at_origin_is_uniform(K):
    soft = pi_map(_constant_stack(np.zeros(K - 1)), 1.0, simplex_vertices(K - 1))
    np.testing.assert_allclose(soft.values, 1.0 / K)


def test_pi_at_vertex_with_tiny_c():
    vertices = simplex_vertices(2)
    soft = pi_map(_constant_stack(vertices.vertices[0]), 0.01, vertices)
    assert np.all(soft.values[0] >= 1 - 1e-6)


def test_pi_does_not_overflow_for_small_c():
    soft = pi_map(_random_stack(3, seed=1), 1e-4, simplex_vertices(3))
    assert np.all(np.isfinite(soft.values))
    np.testing.assert_allclose(soft.values.sum(axis=0), 1.0, atol=1e-9)


@pytest.mark.parametrize("c", [0.05, 0.5, 3.0])
def test_pi_sums_to_one(c):
    soft = pi_map(_random_stack(4, seed=2), c, simplex_vertices(4))
    assert np.all(soft.values >= 0)
    np.testing.assert_allclose(soft.values.sum(axis=0), 1.0, atol=1e-9)


@pytest.mark.parametrize("c", [0.0, -1.0])
def test_pi_rejects_nonpositive_c(c):
    with pytest.raises(InvalidArgumentError):
        pi_map(_random_stack(1), c, simplex_vertices(1))


def test_pi_rejects_component_mismatch():
    with pytest.raises(InvalidArgumentError):
        pi_map(_random_stack(2), 1.0, simplex_vertices(3))


def test_gum_field_binary_midpoint():
    field = gum_field(_constant_stack([0.0]), 1.0, ClassSet.default(2))
    np.testing.assert_allclose(field.values, 0.5)


def test_gum_field_dirac_limit():
    vertices = simplex_vertices(2)
    field = gum_field(_constant_stack(vertices.vertices[2]), 0.01, ClassSet.default(3))
    np.testing.assert_allclose(field.values, 2.0, atol=1e-4)


def test_gum_field_is_convex_combination():
    classes = ClassSet((3, 7, 20, 21))
    field = gum_field(_random_stack(3, seed=3), 0.7, classes)
    assert np.all(field.values >= 3)
    assert np.all(field.values <= 21)


def test_dgum_field_nearest_vertex():
    labels = dgum_field(_constant_stack([0.3]), ClassSet.default(2)).labels
    np.testing.assert_array_equal(labels, 0)
    labels = dgum_field(_constant_stack([-0.3]), ClassSet((5, 9))).labels
    np.testing.assert_array_equal(labels, 9)


def test_dgum_field_tie_goes_to_lowest_class():
    labels = dgum_field(_constant_stack([0.0]), ClassSet.default(2)).labels
    np.testing.assert_array_equal(labels, 0)
    labels = dgum_field(_constant_stack([0.0, 0.0]), ClassSet.default(3)).labels
    np.testing.assert_array_equal(labels, 0)


@pytest.mark.parametrize("K", [2, 3, 4])
def test_dgum_field_is_limit_of_gum_field(K):
    z = _random_stack(K - 1, seed=K)
    vertices = simplex_vertices(K - 1)
    distances = np.sort(
        np.sum(
            (z.values[None] - vertices.vertices[:, :, None, None]) ** 2, axis=1
        ),
        axis=0,
    )
    clear = np.sqrt(distances[1]) - np.sqrt(distances[0]) > 1e-2
    labels = dgum_field(z, ClassSet.default(K)).labels
    soft = gum_field(z, 1e-4, ClassSet.default(K)).values
    np.testing.assert_array_equal(labels[clear], np.rint(soft[clear]))


def test_dgum_field_is_invariant_under_joint_scaling():
    z = _random_stack(2, seed=5)
    vertices = simplex_vertices(2)
    scaled_z = RealFieldStack(z.shape, 3.5 * z.values)
    scaled = SimplexVertices(2, 3.5 * vertices.vertices)
    classes = ClassSet.default(3)
    np.testing.assert_array_equal(
        dgum_field(z, classes, vertices).labels,
        dgum_field(scaled_z, classes, scaled).labels,
    )


def test_permuting_vertices_permutes_histogram():
    z = _random_stack(2, seed=6, shape=GridShape(20, 20))
    vertices = simplex_vertices(2)
    classes = ClassSet.default(3)
    order = [2, 0, 1]
    permuted = SimplexVertices(2, vertices.vertices[order])
    base = class_frequencies(dgum_field(z, classes, vertices), classes)
    moved = class_frequencies(dgum_field(z, classes, permuted), classes)
    np.testing.assert_allclose(moved, base[order])


def test_dgum_field_rejects_vertex_class_mismatch():
    with pytest.raises(InvalidArgumentError):
        dgum_field(_random_stack(2), ClassSet.default(4), simplex_vertices(2))


@pytest.mark.parametrize("threads", [1, 4])
@pytest.mark.parametrize("seed", [0, 1, 2, 3, 42])
def test_sample_dgum_is_deterministic(seed, threads):
    spec = MultivariateGmrfSpec(K=3, covariances=(CovarianceSpec(kappa=0.5),))
    shape = GridShape(32, 32)
    a = sample_dgum(shape, spec, ClassSet.default(3), seed=seed, threads=1)
    b = sample_dgum(shape, spec, ClassSet.default(3), seed=seed, threads=threads)
    assert a.labels.tobytes() == b.labels.tobytes()
    assert set(np.unique(a.labels)) <= {0, 1, 2}


def test_sample_dgum_rejects_class_count_mismatch():
    with pytest.raises(InvalidArgumentError):
        sample_dgum(
            GridShape(8, 8), MultivariateGmrfSpec(K=3), ClassSet.default(2), seed=0
        )


def test_sample_labels_from_pi_uses_pi_probabilities():
    classes = ClassSet.default(3)
    z = _random_stack(2, seed=7, shape=GridShape(4, 5))
    soft = pi_map(z, 0.8, simplex_vertices(2)).values
    # Uniforms just below and just above the first cumulative threshold.
    below = soft[0] * 0.999
    above = np.minimum(soft[0] + 1e-9, 1 - 1e-12)
    low = sample_labels_from_pi(z, 0.8, classes, seed=0, uniforms=below).labels
    high = sample_labels_from_pi(z, 0.8, classes, seed=0, uniforms=above).labels
    np.testing.assert_array_equal(low, 0)
    assert np.all(high >= 1)


def test_sample_labels_from_pi_rejects_uniform_shape():
    z = _random_stack(1, shape=GridShape(3, 3))
    with pytest.raises(InvalidArgumentError):
        sample_labels_from_pi(
            z, 1.0, ClassSet.default(2), seed=0, uniforms=np.zeros((2, 2))
        )


def test_sample_labels_from_pi_dirac_limit():
    z = _random_stack(2, seed=8, shape=GridShape(16, 16))
    classes = ClassSet.default(3)
    labels = sample_labels_from_pi(z, 1e-4, classes, seed=1).labels
    np.testing.assert_array_equal(labels, dgum_field(z, classes).labels)


def test_sample_labels_from_pi_is_deterministic():
    z = _random_stack(1, seed=9)
    a = sample_labels_from_pi(z, 1.0, ClassSet.default(2), seed=3).labels
    b = sample_labels_from_pi(z, 1.0, ClassSet.default(2), seed=3).labels
    np.testing.assert_array_equal(a, b)


def test_sample_labels_from_pi_large_c_is_independent():
    shape = GridShape(150, 150)
    spec = MultivariateGmrfSpec(K=2)
    z = sample_multivariate(shape, spec, seed=0)
    labels = sample_labels_from_pi(z, 1e4, ClassSet.default(2), seed=0)
    assert neighbor_agreement(labels) == pytest.approx(0.5, abs=0.02)


@pytest.mark.slow
def test_binary_dgum_class_balance():
    shape = GridShape(150, 150)
    classes = ClassSet.default(2)
    spec = MultivariateGmrfSpec(K=2)
    f0 = [
        class_frequencies(sample_dgum(shape, spec, classes, seed), classes)[0]
        for seed in range(50)
    ]
    assert np.mean(f0) == pytest.approx(0.5, abs=3 * 0.094 / math.sqrt(50))


@pytest.mark.slow
def test_seven_class_dgum_balance():
    shape = GridShape(150, 150)
    classes = ClassSet.default(7)
    spec = MultivariateGmrfSpec(K=7)
    frequencies = np.mean(
        [
            class_frequencies(sample_dgum(shape, spec, classes, seed), classes)
            for seed in range(50)
        ],
        axis=0,
    )
    np.testing.assert_allclose(frequencies, 1 / 7, atol=0.15 / 7)
