"""Type definitions for dgum."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from .const import (
    CONVERGENCE_THRESHOLD,
    CONVERGENCE_WINDOW,
    DEFAULT_BANDS,
    DEFAULT_MAX_NEGATIVE_MASS,
    EMBEDDING_APPROXIMATE,
    EMBEDDING_MODES,
    GMRF_METHODS,
    METHOD_FOURIER,
    METHOD_SPECTRAL,
)
from .exceptions import InvalidArgumentError

type RngSeed = int


class NeighborhoodSystem(StrEnum):
    """Toroidal neighborhood systems."""

    FOUR = "four"
    EIGHT = "eight"


@dataclass(frozen=True)
class GridShape:
    """Rectangular toroidal lattice; sites are indexed row-major."""

    height: int
    width: int

    def __post_init__(self) -> None:
        if int(self.height) < 1 or int(self.width) < 1:
            raise InvalidArgumentError(
                f"grid dimensions must be positive, got {self.height}x{self.width}"
            )

    @property
    def n(self) -> int:
        return self.height * self.width

    @property
    def dims(self) -> tuple[int, int]:
        return (self.height, self.width)

    def index(self, row: int, col: int) -> int:
        """Return the row-major site index of (row, col)."""
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise InvalidArgumentError(f"site ({row}, {col}) outside {self}")
        return row * self.width + col

    def coords(self, s: int) -> tuple[int, int]:
        """Return (row, col) of site index s."""
        if not 0 <= s < self.n:
            raise InvalidArgumentError(f"site index {s} outside 0..{self.n - 1}")
        return divmod(s, self.width)


@dataclass(frozen=True, eq=False)
class Coloring:
    """Per-site color ids such that no edge is monochromatic."""

    shape: GridShape
    system: NeighborhoodSystem
    colors: np.ndarray
    num_colors: int

    def masks(self) -> list[np.ndarray]:
        """Boolean (height, width) masks, one per color."""
        return [self.colors == c for c in range(self.num_colors)]


@dataclass(frozen=True)
class CovarianceSpec:
    """Matérn parameters: marginal std dev, inverse range and smoothness."""

    sigma: float = 1.0
    kappa: float = 0.1
    nu: float = 1.0

    def __post_init__(self) -> None:
        for name in ("sigma", "kappa", "nu"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidArgumentError(f"{name} must be positive, got {value}")

    @property
    def variance(self) -> float:
        return self.sigma**2


@dataclass(frozen=True, eq=False)
class CirculantBase:
    """First row of a block-circulant covariance, as a (height, width) array."""

    shape: GridShape
    spec: CovarianceSpec
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a block-circulant covariance, clamped to be nonnegative."""

    shape: GridShape
    eigenvalues: np.ndarray
    negative_mass: float = 0.0


@dataclass(frozen=True, eq=False)
class RealField:
    shape: GridShape
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class RealFieldStack:
    """K-1 real fields over one grid, stored as a (K-1, height, width) array."""

    shape: GridShape
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 3 or self.values.shape[1:] != self.shape.dims:
            raise InvalidArgumentError(
                f"stack values of shape {self.values.shape} do not match {self.shape}"
            )
        if self.values.shape[0] < 1:
            raise InvalidArgumentError("a field stack needs at least one component")

    @property
    def num_components(self) -> int:
        return int(self.values.shape[0])

    @property
    def components(self) -> list[RealField]:
        return [RealField(self.shape, v) for v in self.values]

    @classmethod
    def from_fields(cls, fields: list[RealField]) -> RealFieldStack:
        if not fields:
            raise InvalidArgumentError("a field stack needs at least one component")
        shape = fields[0].shape
        if any(f.shape != shape for f in fields):
            raise InvalidArgumentError("all stack components must share one shape")
        return cls(shape, np.stack([f.values for f in fields]))


@dataclass(frozen=True)
class MultivariateGmrfSpec:
    """K-1 independent stationary GMRF components feeding a K-class GUM.

    One shared covariance gives the isotropic case; K-1 covariances give the
    block-diagonal anisotropic case. Zero means give the balanced case.
    """

    K: int
    means: tuple[float, ...] = ()
    covariances: tuple[CovarianceSpec, ...] = (CovarianceSpec(),)
    method: str = METHOD_FOURIER
    bands: int = DEFAULT_BANDS
    embedding: str = EMBEDDING_APPROXIMATE
    max_negative_mass: float = DEFAULT_MAX_NEGATIVE_MASS

    def __post_init__(self) -> None:
        if self.K < 2:
            raise InvalidArgumentError(f"K must be at least 2, got {self.K}")
        if not self.means:
            object.__setattr__(self, "means", (0.0,) * (self.K - 1))
        if len(self.means) != self.K - 1:
            raise InvalidArgumentError(
                f"expected {self.K - 1} means, got {len(self.means)}"
            )
        if len(self.covariances) not in (1, self.K - 1):
            raise InvalidArgumentError(
                f"expected 1 or {self.K - 1} covariances, got {len(self.covariances)}"
            )
        if self.method not in GMRF_METHODS:
            raise InvalidArgumentError(f"unknown GMRF method: {self.method}")
        if self.method == METHOD_SPECTRAL and self.bands < 1:
            raise InvalidArgumentError(f"bands must be positive, got {self.bands}")
        if self.embedding not in EMBEDDING_MODES:
            raise InvalidArgumentError(f"unknown embedding mode: {self.embedding}")

    @property
    def P(self) -> int:
        return self.K - 1

    @property
    def isotropic(self) -> bool:
        return len(set(self.covariances)) == 1

    @property
    def balanced(self) -> bool:
        return all(m == 0 for m in self.means)

    def covariance(self, k: int) -> CovarianceSpec:
        """Covariance of component k."""
        if len(self.covariances) == 1:
            return self.covariances[0]
        return self.covariances[k]


@dataclass(frozen=True)
class ClassSet:
    """Ordered class values omega_0 < ... < omega_{K-1}."""

    omegas: tuple[int, ...]

    def __post_init__(self) -> None:
        omegas = tuple(int(w) for w in self.omegas)
        if len(omegas) < 2:
            raise InvalidArgumentError("a class set needs at least two classes")
        if any(w < 0 for w in omegas):
            raise InvalidArgumentError(f"class values must be nonnegative: {omegas}")
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise InvalidArgumentError(
                f"class values must be distinct and increasing: {omegas}"
            )
        object.__setattr__(self, "omegas", omegas)

    @classmethod
    def default(cls, K: int) -> ClassSet:
        return cls(tuple(range(K)))

    @property
    def K(self) -> int:
        return len(self.omegas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.omegas, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SimplexVertices:
    """K unit-norm, equidistant points in R^P; vertex k is bound to class k."""

    P: int
    vertices: np.ndarray

    @property
    def K(self) -> int:
        return self.P + 1


@dataclass(frozen=True, eq=False)
class SoftStack:
    """Per-class probability fields, shape (K, height, width)."""

    shape: GridShape
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class LabelField:
    shape: GridShape
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.labels.shape != self.shape.dims:
            raise InvalidArgumentError(
                f"labels of shape {self.labels.shape} do not match {self.shape}"
            )


@dataclass(frozen=True)
class PottsSpec:
    """Potts model; attractive=True rewards agreement between neighbors."""

    K: int
    beta: float
    system: NeighborhoodSystem = NeighborhoodSystem.EIGHT
    attractive: bool = True

    def __post_init__(self) -> None:
        if self.K < 2:
            raise InvalidArgumentError(f"K must be at least 2, got {self.K}")
        if not np.isfinite(self.beta) or self.beta < 0:
            raise InvalidArgumentError(f"beta must be nonnegative, got {self.beta}")
        object.__setattr__(self, "system", NeighborhoodSystem(self.system))


@dataclass
class ConvergenceState:
    """Ring buffer of the most recent label arrays."""

    window: int = CONVERGENCE_WINDOW
    threshold: float = CONVERGENCE_THRESHOLD
    history: deque = field(default_factory=deque)

    def __post_init__(self) -> None:
        self.history = deque(self.history, maxlen=self.window)


@dataclass(frozen=True, eq=False)
class GibbsResult:
    field: LabelField
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class BalanceReport:
    classes: ClassSet
    mean_frequencies: np.ndarray
    bias: float
    std: float
    replicates: int
    frequencies: np.ndarray


@dataclass(frozen=True, eq=False)
class SimilarityCurve:
    distances: np.ndarray
    estimates: np.ndarray
    pairs: np.ndarray
