"""Stationary GMRF samplers on the torus: Fourier, spectral and dense Cholesky."""

from __future__ import annotations

import functools
import logging
import math
from typing import Final

import numpy as np

from .const import (
    CHOLESKY_MAX_SITES,
    DEFAULT_MAX_NEGATIVE_MASS,
    DOMAIN,
    EMBEDDING_APPROXIMATE,
    METHOD_CHOLESKY,
    METHOD_FOURIER,
    METHOD_SPECTRAL,
    SPECTRAL_CHUNK,
    STREAM_COMPONENT,
)
from .covariance import base_eigenvalues, circulant_base, covariance_matrix
from .exceptions import CapacityError, FactorizationError, InvalidArgumentError
from .rng import derive_seed, generator
from .types import (
    CovarianceSpec,
    GridShape,
    MultivariateGmrfSpec,
    RealField,
    RealFieldStack,
    RngSeed,
)
from .utils import ordered_map, thread_count

_LOGGER: Final = logging.getLogger(__name__)


@functools.lru_cache(maxsize=32)
def _sqrt_spectrum(
    shape: GridShape, spec: CovarianceSpec, embedding: str, max_negative_mass: float
) -> np.ndarray:
    spectrum = base_eigenvalues(
        circulant_base(shape, spec), mode=embedding, max_negative_mass=max_negative_mass
    )
    root = np.sqrt(spectrum.eigenvalues)
    root.setflags(write=False)
    return root


@functools.lru_cache(maxsize=8)
def _cholesky_factor(shape: GridShape, spec: CovarianceSpec) -> np.ndarray:
    sigma = covariance_matrix(circulant_base(shape, spec))
    try:
        factor = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as e:
        raise FactorizationError(
            f"covariance {spec} on {shape.height}x{shape.width} is not positive "
            f"definite: {e}"
        ) from e
    factor.setflags(write=False)
    return factor


def clear_caches() -> None:
    """Drop cached spectra and Cholesky factors."""
    _sqrt_spectrum.cache_clear()
    _cholesky_factor.cache_clear()


def sample_fourier(
    shape: GridShape,
    spec: CovarianceSpec,
    seed: RngSeed,
    embedding: str = EMBEDDING_APPROXIMATE,
    max_negative_mass: float = DEFAULT_MAX_NEGATIVE_MASS,
) -> RealField:
    """Zero-mean stationary field with torus covariance matern(., spec).

    With lambda the eigenvalues of the circulant covariance and u a complex
    standard normal vector, z = sqrt(n) * Re(IDFT(sqrt(lambda) * u)).
    """
    root = _sqrt_spectrum(shape, spec, embedding, max_negative_mass)
    rng = generator(seed)
    u = rng.standard_normal(shape.dims) + 1j * rng.standard_normal(shape.dims)
    values = math.sqrt(shape.n) * np.fft.ifft2(root * u).real
    return RealField(shape, values)


def _band_sum(
    coords: np.ndarray, eta: np.ndarray, phase: np.ndarray, start: int, stop: int
) -> np.ndarray:
    return np.cos(coords @ eta[start:stop].T + phase[start:stop]).sum(axis=1)


def sample_spectral(
    shape: GridShape,
    spec: CovarianceSpec,
    p: int,
    seed: RngSeed,
    threads: int | None = None,
) -> RealField:
    """Approximately Gaussian Matérn field as a normalized sum of p cosine bands.

    Per band: g ~ Gamma(shape nu, rate kappa^2 / 2), frequency eta ~ N(0, I/g)
    in R^2, phase ~ U[0, 2 pi). Bands are summed in fixed chunk order, so the
    result does not depend on the thread count.
    """
    if int(p) < 1:
        raise InvalidArgumentError(f"number of bands must be positive, got {p}")
    p = int(p)
    rng = generator(seed)
    g = rng.gamma(shape=spec.nu, scale=2.0 / spec.kappa**2, size=p)
    xi = 1.0 / (2.0 * g)
    eta = rng.standard_normal((p, 2)) * np.sqrt(2.0 * xi)[:, np.newaxis]
    phase = rng.uniform(0.0, 2.0 * math.pi, size=p)

    rows, cols = np.divmod(np.arange(shape.n, dtype=np.float64), shape.width)
    coords = np.stack([rows, cols], axis=1)
    chunks = [(i, min(i + SPECTRAL_CHUNK, p)) for i in range(0, p, SPECTRAL_CHUNK)]
    partials = ordered_map(
        lambda chunk: _band_sum(coords, eta, phase, *chunk),
        chunks,
        thread_count(threads),
    )
    total = np.zeros(shape.n)
    for partial in partials:
        total += partial
    values = spec.sigma * math.sqrt(2.0 / p) * total
    return RealField(shape, values.reshape(shape.dims))


def sample_cholesky(shape: GridShape, spec: CovarianceSpec, seed: RngSeed) -> RealField:
    """Exact N(0, Sigma) draw with Sigma built from torus distances (small grids)."""
    if shape.n > CHOLESKY_MAX_SITES:
        raise CapacityError(
            f"dense Cholesky oracle supports at most {CHOLESKY_MAX_SITES} sites, "
            f"got {shape.n}"
        )
    factor = _cholesky_factor(shape, spec)
    rng = generator(seed)
    values = factor @ rng.standard_normal(shape.n)
    return RealField(shape, values.reshape(shape.dims))


def sample_gmrf(
    shape: GridShape,
    spec: CovarianceSpec,
    seed: RngSeed,
    method: str = METHOD_FOURIER,
    bands: int = 5000,
    embedding: str = EMBEDDING_APPROXIMATE,
    max_negative_mass: float = DEFAULT_MAX_NEGATIVE_MASS,
    threads: int | None = None,
) -> RealField:
    """Draw one zero-mean field with the named method."""
    if method == METHOD_FOURIER:
        return sample_fourier(shape, spec, seed, embedding, max_negative_mass)
    if method == METHOD_SPECTRAL:
        return sample_spectral(shape, spec, bands, seed, threads)
    if method == METHOD_CHOLESKY:
        return sample_cholesky(shape, spec, seed)
    raise InvalidArgumentError(f"unknown GMRF method: {method}")


def sample_multivariate(
    shape: GridShape,
    spec: MultivariateGmrfSpec,
    seed: RngSeed,
    threads: int | None = None,
) -> RealFieldStack:
    """K-1 independent components, component k shifted by means[k].

    Component k uses the derived seed hash(seed, k), so each component is
    reproducible on its own and independent of the thread schedule.
    """
    _LOGGER.debug(
        "%s - sample_multivariate: K=%s method=%s grid=%sx%s",
        DOMAIN,
        spec.K,
        spec.method,
        *shape.dims,
    )

    def component(k: int) -> np.ndarray:
        field = sample_gmrf(
            shape,
            spec.covariance(k),
            derive_seed(seed, STREAM_COMPONENT, k),
            method=spec.method,
            bands=spec.bands,
            embedding=spec.embedding,
            max_negative_mass=spec.max_negative_mass,
            threads=1,
        )
        return field.values + spec.means[k]

    values = ordered_map(component, range(spec.P), threads)
    return RealFieldStack(shape, np.stack(values))
