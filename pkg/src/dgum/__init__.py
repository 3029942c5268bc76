"""Fast sampling of discrete Markov random fields through discretized Gaussian fields."""

from __future__ import annotations

from importlib_metadata import PackageNotFoundError, version

try:
    __version__ = version("dgum")
except PackageNotFoundError:
    __version__ = "0.0.0"

from .exceptions import (  # noqa: E402
    CapacityError,
    ConfigError,
    DataError,
    DgumError,
    EmbeddingError,
    FactorizationError,
    InvalidArgumentError,
)
from .gmrf import sample_gmrf, sample_multivariate  # noqa: E402
from .gum import dgum_field, gum_field, sample_dgum, simplex_vertices  # noqa: E402
from .potts import chromatic_gibbs_sample, gibbs_sample  # noqa: E402
from .types import (  # noqa: E402
    ClassSet,
    CovarianceSpec,
    GridShape,
    LabelField,
    MultivariateGmrfSpec,
    NeighborhoodSystem,
    PottsSpec,
)

__all__ = [
    "CapacityError",
    "ClassSet",
    "ConfigError",
    "CovarianceSpec",
    "DataError",
    "DgumError",
    "EmbeddingError",
    "FactorizationError",
    "GridShape",
    "InvalidArgumentError",
    "LabelField",
    "MultivariateGmrfSpec",
    "NeighborhoodSystem",
    "PottsSpec",
    "__version__",
    "chromatic_gibbs_sample",
    "dgum_field",
    "gibbs_sample",
    "gum_field",
    "sample_dgum",
    "sample_gmrf",
    "sample_multivariate",
    "simplex_vertices",
]
