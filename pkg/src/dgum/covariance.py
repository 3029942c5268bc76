"""Matérn covariance and circulant covariance bases on the torus."""

from __future__ import annotations

import logging
from typing import Final

import numpy as np
from scipy import special

from .const import (
    DEFAULT_MAX_NEGATIVE_MASS,
    DOMAIN,
    EMBEDDING_APPROXIMATE,
    EMBEDDING_EXACT,
    EPS_CLAMP,
    EPS_IMAG,
)
from .exceptions import EmbeddingError, InvalidArgumentError
from .lattice import torus_distance_grid
from .types import CirculantBase, CovarianceSpec, GridShape, Spectrum

_LOGGER: Final = logging.getLogger(__name__)


def bessel_k(nu: float, x: float | np.ndarray) -> float | np.ndarray:
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    x = np.asarray(x, dtype=np.float64)
    if nu <= 0:
        raise InvalidArgumentError(f"order must be positive, got {nu}")
    if np.any(x <= 0):
        raise InvalidArgumentError("K_nu is only defined for x > 0")
    out = special.kv(nu, x)
    return float(out) if out.ndim == 0 else out


def matern(d: float | np.ndarray, spec: CovarianceSpec) -> float | np.ndarray:
    """Matérn covariance C(d); C(0) = sigma^2."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise InvalidArgumentError("distances must be nonnegative")
    out = np.full(d.shape, spec.variance)
    pos = d > 0
    if np.any(pos):
        x = spec.kappa * d[pos]
        scale = spec.variance / (2.0 ** (spec.nu - 1.0) * special.gamma(spec.nu))
        # K_nu underflows to 0 far out, where the covariance is 0 anyway.
        out[pos] = scale * x**spec.nu * special.kv(spec.nu, x)
    return float(out) if out.ndim == 0 else out


def circulant_base(shape: GridShape, spec: CovarianceSpec) -> CirculantBase:
    """Covariance at every torus lag, indexed by (dr, dc)."""
    values = matern(torus_distance_grid(shape), spec)
    return CirculantBase(shape, spec, np.atleast_2d(values))


def covariance_matrix(base: CirculantBase) -> np.ndarray:
    """Dense (n, n) covariance whose (i, j) entry is the base at lag i - j."""
    shape = base.shape
    rows, cols = np.divmod(np.arange(shape.n), shape.width)
    dr = (rows[:, np.newaxis] - rows[np.newaxis, :]) % shape.height
    dc = (cols[:, np.newaxis] - cols[np.newaxis, :]) % shape.width
    return base.values[dr, dc]


def base_eigenvalues(
    base: CirculantBase,
    mode: str = EMBEDDING_EXACT,
    max_negative_mass: float = DEFAULT_MAX_NEGATIVE_MASS,
) -> Spectrum:
    """Eigenvalues of the block-circulant covariance, via the 2D DFT of its base.

    exact: negatives down to -EPS_CLAMP * sigma^2 are roundoff and clamped,
    anything lower raises EmbeddingError.
    approximate: every negative is clamped; EmbeddingError only when the
    clamped mass exceeds max_negative_mass of the trace.
    """
    variance = base.spec.variance
    transform = np.fft.fft2(base.values)
    imag = float(np.max(np.abs(transform.imag)))
    if imag > EPS_IMAG * variance:
        _LOGGER.warning(
            "%s - base_eigenvalues: base is not symmetric, max imaginary part %s",
            DOMAIN,
            imag,
        )
    eigenvalues = transform.real
    lowest = float(eigenvalues.min())
    negative_mass = float(-eigenvalues[eigenvalues < 0].sum()) / (
        base.shape.n * variance
    )
    if mode == EMBEDDING_EXACT:
        if lowest < -EPS_CLAMP * variance:
            raise EmbeddingError(
                f"covariance {base.spec} is not realizable on a "
                f"{base.shape.height}x{base.shape.width} torus "
                f"(smallest eigenvalue {lowest:.3g})"
            )
    elif mode == EMBEDDING_APPROXIMATE:
        if negative_mass > max_negative_mass:
            raise EmbeddingError(
                f"covariance {base.spec} on a {base.shape.height}x"
                f"{base.shape.width} torus: negative eigenvalue mass "
                f"{negative_mass:.3g} exceeds {max_negative_mass}"
            )
        if lowest < -EPS_CLAMP * variance:
            _LOGGER.warning(
                "%s - base_eigenvalues: clamping negative eigenvalues "
                "(smallest %.3g, mass %.3g of the trace)",
                DOMAIN,
                lowest,
                negative_mass,
            )
    else:
        raise InvalidArgumentError(f"unknown embedding mode: {mode}")
    return Spectrum(base.shape, np.maximum(eigenvalues, 0.0), negative_mass)
