"""Shared fixtures for the dgum test suite."""

from __future__ import annotations

import numpy as np
import pytest

from dgum.types import ClassSet, CovarianceSpec, GridShape, LabelField


@pytest.fixture
def default_cov() -> CovarianceSpec:
    """sigma=1, kappa=0.1, nu=1."""
    return CovarianceSpec(sigma=1.0, kappa=0.1, nu=1.0)


@pytest.fixture
def short_cov() -> CovarianceSpec:
    """Short range covariance that embeds exactly on small tori."""
    return CovarianceSpec(sigma=1.0, kappa=1.0, nu=1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def iid_labels(shape: GridShape, K: int, seed: int = 0) -> LabelField:
    """I.i.d. uniform labels 0..K-1."""
    labels = np.random.default_rng(seed).integers(0, K, size=shape.dims)
    return LabelField(shape, labels)


def constant_labels(shape: GridShape, value: int = 0) -> LabelField:
    return LabelField(shape, np.full(shape.dims, value, dtype=np.int64))


def binary_classes() -> ClassSet:
    return ClassSet.default(2)
