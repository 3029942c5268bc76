"""Tests for dgum.gmrf."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats as sps

from dgum.const import EMBEDDING_EXACT, METHOD_CHOLESKY, METHOD_SPECTRAL
from dgum.covariance import circulant_base, covariance_matrix, matern
from dgum.exceptions import CapacityError, InvalidArgumentError
from dgum.gmrf import (
    sample_cholesky,
    sample_fourier,
    sample_gmrf,
    sample_multivariate,
    sample_spectral,
)
from dgum.stats import empirical_covariance
from dgum.types import CovarianceSpec, GridShape, MultivariateGmrfSpec


SEEDS = [0, 1, 2, 3, 4]


def _stack(fields) -> np.ndarray:
    return np.stack([f.values for f in fields])


@pytest.mark.parametrize("seed", SEEDS)
def test_fourier_is_deterministic(default_cov, seed):
    shape = GridShape(64, 64)
    a = sample_fourier(shape, default_cov, seed=seed)
    b = sample_fourier(shape, default_cov, seed=seed)
    c = sample_fourier(shape, default_cov, seed=seed + 100)
    assert a.values.shape == shape.dims
    assert a.values.tobytes() == b.values.tobytes()
    assert not np.array_equal(a.values, c.values)


def test_fourier_exact_embedding_on_short_range(short_cov):
    field = sample_fourier(GridShape(32, 32), short_cov, 0, embedding=EMBEDDING_EXACT)
    assert np.all(np.isfinite(field.values))


def test_fourier_on_rectangular_grid(short_cov):
    field = sample_fourier(GridShape(12, 20), short_cov, 1)
    assert field.values.shape == (12, 20)


def test_spectral_single_band_is_bounded(default_cov):
    for seed in range(20):
        field = sample_spectral(GridShape(16, 16), default_cov, 1, seed)
        assert np.all(np.abs(field.values) <= math.sqrt(2) + 1e-12)


@pytest.mark.parametrize("threads", [1, 4])
@pytest.mark.parametrize("seed", SEEDS)
def test_spectral_is_independent_of_thread_count(default_cov, seed, threads):
    shape = GridShape(24, 24)
    one = sample_spectral(shape, default_cov, 1000, seed=seed, threads=1)
    again = sample_spectral(shape, default_cov, 1000, seed=seed, threads=threads)
    assert one.values.tobytes() == again.values.tobytes()


def test_spectral_rejects_zero_bands(default_cov):
    with pytest.raises(InvalidArgumentError):
        sample_spectral(GridShape(4, 4), default_cov, 0, seed=0)


@pytest.mark.parametrize("seed", SEEDS)
def test_cholesky_is_deterministic(short_cov, seed):
    shape = GridShape(8, 8)
    a = sample_cholesky(shape, short_cov, seed)
    b = sample_cholesky(shape, short_cov, seed)
    assert a.values.tobytes() == b.values.tobytes()
    other = sample_cholesky(shape, short_cov, seed + 1)
    assert not np.array_equal(a.values, other.values)


def test_cholesky_single_site():
    field = sample_cholesky(GridShape(1, 1), CovarianceSpec(sigma=2.0), seed=5)
    assert field.values.shape == (1, 1)
    assert np.isfinite(field.values[0, 0])


def test_cholesky_capacity_limit(short_cov):
    with pytest.raises(CapacityError):
        sample_cholesky(GridShape(65, 64), short_cov, seed=0)


def test_cholesky_marginal_is_standard_normal(short_cov):
    shape = GridShape(16, 16)
    values = [
        sample_cholesky(shape, short_cov, seed).values[3, 5] for seed in range(2000)
    ]
    assert sps.kstest(values, "norm").pvalue > 0.01


def test_sample_gmrf_dispatch(short_cov):
    shape = GridShape(8, 8)
    np.testing.assert_array_equal(
        sample_gmrf(shape, short_cov, 2, method=METHOD_CHOLESKY).values,
        sample_cholesky(shape, short_cov, 2).values,
    )
    with pytest.raises(InvalidArgumentError):
        sample_gmrf(shape, short_cov, 2, method="bogus")


def test_multivariate_k2_has_one_component(short_cov):
    spec = MultivariateGmrfSpec(K=2, covariances=(short_cov,))
    stack = sample_multivariate(GridShape(16, 16), spec, seed=0)
    assert stack.num_components == 1


@pytest.mark.parametrize("threads", [1, 4])
@pytest.mark.parametrize("seed", SEEDS)
def test_multivariate_is_independent_of_thread_count(seed, threads):
    spec = MultivariateGmrfSpec(K=4, covariances=(CovarianceSpec(kappa=0.5),))
    shape = GridShape(32, 32)
    one = sample_multivariate(shape, spec, seed=seed, threads=1)
    again = sample_multivariate(shape, spec, seed=seed, threads=threads)
    assert one.values.tobytes() == again.values.tobytes()


def test_multivariate_components_use_distinct_streams():
    spec = MultivariateGmrfSpec(K=3, covariances=(CovarianceSpec(kappa=0.5),))
    stack = sample_multivariate(GridShape(16, 16), spec, seed=0)
    assert not np.array_equal(stack.values[0], stack.values[1])


def test_multivariate_mean_shift(short_cov):
    spec = MultivariateGmrfSpec(K=3, means=(0.4, 0.0), covariances=(short_cov,))
    shape = GridShape(16, 16)
    means = [
        sample_multivariate(shape, spec, seed).values.mean(axis=(1, 2))
        for seed in range(200)
    ]
    assert np.mean(means, axis=0) == pytest.approx([0.4, 0.0], abs=0.05)


def test_multivariate_components_are_uncorrelated(short_cov):
    spec = MultivariateGmrfSpec(K=3, covariances=(short_cov,))
    shape = GridShape(16, 16)
    values = np.stack(
        [sample_multivariate(shape, spec, seed).values for seed in range(500)]
    )
    corr = np.corrcoef(values[:, 0].ravel(), values[:, 1].ravel())[0, 1]
    assert abs(corr) < 0.05


def test_anisotropic_components_follow_their_own_covariance():
    spec = MultivariateGmrfSpec(
        K=3, covariances=(CovarianceSpec(kappa=0.5), CovarianceSpec(kappa=5.0))
    )
    assert not spec.isotropic
    stack = sample_multivariate(GridShape(32, 32), spec, seed=1)
    smooth = np.mean(np.abs(np.diff(stack.values[0], axis=1)))
    rough = np.mean(np.abs(np.diff(stack.values[1], axis=1)))
    assert smooth < rough


@pytest.mark.slow
def test_fourier_variance_and_lag_one_covariance(default_cov):
    shape = GridShape(64, 64)
    values = _stack(sample_fourier(shape, default_cov, seed) for seed in range(2000))
    variance = values.var(axis=0, ddof=1)
    assert np.all(np.abs(variance - 1.0) < 0.15)
    assert abs(variance.mean() - 1.0) < 0.1
    lag_one = np.mean(values * np.roll(values, -1, axis=2))
    assert lag_one == pytest.approx(matern(1.0, default_cov), abs=0.03)


@pytest.mark.slow
def test_fourier_covariance_matches_matern(default_cov):
    shape = GridShape(64, 64)
    fields = [sample_fourier(shape, default_cov, seed) for seed in range(2000)]
    table = empirical_covariance(fields, max_lag=30)
    expected = matern(table["lag"].to_numpy(dtype=float), default_cov)
    np.testing.assert_allclose(table["covariance"], expected, atol=0.05)


@pytest.mark.slow
def test_spectral_covariance_matches_matern(default_cov):
    shape = GridShape(64, 64)
    fields = [
        sample_gmrf(shape, default_cov, seed, method=METHOD_SPECTRAL, bands=5000)
        for seed in range(500)
    ]
    values = _stack(fields)
    assert abs(values.var(axis=0, ddof=1).mean() - 1.0) < 0.1
    table = empirical_covariance(fields, max_lag=30, wrap=False)
    table = table[table["lag"].isin([0, 2, 5, 10, 15, 20, 30])]
    expected = matern(table["lag"].to_numpy(dtype=float), default_cov)
    np.testing.assert_allclose(table["covariance"], expected, atol=0.05)


@pytest.mark.slow
def test_fourier_agrees_with_cholesky_oracle(short_cov):
    shape = GridShape(16, 16)
    fourier = empirical_covariance(
        [sample_fourier(shape, short_cov, seed) for seed in range(5000)], max_lag=8
    )
    cholesky = empirical_covariance(
        [sample_cholesky(shape, short_cov, seed) for seed in range(5000)], max_lag=8
    )
    np.testing.assert_allclose(fourier["covariance"], cholesky["covariance"], atol=0.05)


@pytest.mark.slow
def test_cholesky_covariance_matrix():
    # Correlated enough for the Frobenius error to be dominated by signal.
    spec = CovarianceSpec(sigma=1.0, kappa=0.6, nu=1.0)
    shape = GridShape(16, 16)
    values = np.stack(
        [sample_cholesky(shape, spec, seed).values.ravel() for seed in range(5000)]
    )
    sigma = covariance_matrix(circulant_base(shape, spec))
    empirical = np.cov(values, rowvar=False)
    error = np.linalg.norm(empirical - sigma) / np.linalg.norm(sigma)
    assert error < 0.1
