"""Unit simplex and the GUM / DGUM mappings from GMRF stacks to class fields."""

from __future__ import annotations

import logging
import math
from typing import Final

import numpy as np

from .const import DOMAIN, STREAM_PI_LABELS
from .exceptions import InvalidArgumentError
from .gmrf import sample_multivariate
from .rng import generator
from .types import (
    ClassSet,
    GridShape,
    LabelField,
    MultivariateGmrfSpec,
    RealField,
    RealFieldStack,
    RngSeed,
    SimplexVertices,
    SoftStack,
)
from .utils import draw_categorical

_LOGGER: Final = logging.getLogger(__name__)


def simplex_vertices(P: int) -> SimplexVertices:
    """Vertices of the regular simplex with P + 1 unit-norm vertices in R^P.

    Vertex j < P is sqrt((P+1)/P) e_j - (sqrt(P+1) - 1) / (P sqrt(P)) * 1 and
    the last vertex is -1/sqrt(P) * 1.
    """
    if int(P) != P or P < 1:
        raise InvalidArgumentError(f"simplex dimension must be >= 1, got {P}")
    P = int(P)
    shift = (math.sqrt(P + 1) - 1) / (P * math.sqrt(P))
    vertices = np.empty((P + 1, P))
    vertices[:P] = math.sqrt((P + 1) / P) * np.eye(P) - shift
    vertices[P] = -1.0 / math.sqrt(P)
    return SimplexVertices(P, vertices)


def _squared_distances(z: RealFieldStack, vertices: SimplexVertices) -> np.ndarray:
    if z.num_components != vertices.P:
        raise InvalidArgumentError(
            f"stack has {z.num_components} components, simplex expects {vertices.P}"
        )
    diff = z.values[np.newaxis] - vertices.vertices[:, :, np.newaxis, np.newaxis]
    return np.sum(diff * diff, axis=1)


def pi_map(z: RealFieldStack, c: float, vertices: SimplexVertices) -> SoftStack:
    """Per-site softmax of -||z_s - v_k||^2 / c^2 over the K vertices."""
    if not c > 0:
        raise InvalidArgumentError(f"c must be positive, got {c}")
    logits = -_squared_distances(z, vertices) / (c * c)
    logits -= logits.max(axis=0, keepdims=True)
    weights = np.exp(logits)
    return SoftStack(z.shape, weights / weights.sum(axis=0, keepdims=True))


def _vertices_for(classes: ClassSet, vertices: SimplexVertices | None) -> SimplexVertices:
    if vertices is None:
        return simplex_vertices(classes.K - 1)
    if vertices.K != classes.K:
        raise InvalidArgumentError(
            f"{vertices.K} vertices cannot be bound to {classes.K} classes"
        )
    return vertices


def gum_field(
    z: RealFieldStack,
    c: float,
    classes: ClassSet,
    vertices: SimplexVertices | None = None,
) -> RealField:
    """Soft class field: sum_k omega_k * pi_k(z_s)."""
    soft = pi_map(z, c, _vertices_for(classes, vertices))
    omegas = classes.as_array().astype(np.float64)
    return RealField(z.shape, np.tensordot(omegas, soft.values, axes=1))


def dgum_field(
    z: RealFieldStack,
    classes: ClassSet,
    vertices: SimplexVertices | None = None,
) -> LabelField:
    """Hard class field: class of the nearest vertex, ties to the lowest index."""
    nearest = np.argmin(_squared_distances(z, _vertices_for(classes, vertices)), axis=0)
    return LabelField(z.shape, classes.as_array()[nearest])


def sample_dgum(
    shape: GridShape,
    spec: MultivariateGmrfSpec,
    classes: ClassSet,
    seed: RngSeed,
    threads: int | None = None,
) -> LabelField:
    """Sample a GMRF stack and discretize it to labels."""
    if spec.K != classes.K:
        raise InvalidArgumentError(
            f"GMRF spec has K={spec.K} but {classes.K} classes were given"
        )
    _LOGGER.debug(
        "%s - sample_dgum: K=%s balanced=%s isotropic=%s",
        DOMAIN,
        spec.K,
        spec.balanced,
        spec.isotropic,
    )
    return dgum_field(sample_multivariate(shape, spec, seed, threads), classes)


def sample_labels_from_pi(
    z: RealFieldStack,
    c: float,
    classes: ClassSet,
    seed: RngSeed,
    uniforms: np.ndarray | None = None,
) -> LabelField:
    """Independent per-site categorical draws with probabilities pi(z_s).

    uniforms, when given, replaces the seeded U[0, 1) variates.
    """
    soft = pi_map(z, c, _vertices_for(classes, None))
    if uniforms is None:
        uniforms = generator(seed, STREAM_PI_LABELS).random(z.shape.dims)
    elif uniforms.shape != z.shape.dims:
        raise InvalidArgumentError(
            f"uniforms of shape {uniforms.shape} do not match {z.shape}"
        )
    return LabelField(z.shape, classes.as_array()[draw_categorical(soft.values, uniforms)])
