"""Estimators for class balance, pairwise similarity, neighbor agreement and covariance."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from typing import Final, TypeVar

import numpy as np
import pandas as pd

from .const import (
    DECILE_HIGH,
    DECILE_LOW,
    DEFAULT_BANDS,
    DEFAULT_HEIGHT,
    DEFAULT_NU,
    DEFAULT_PAIR_BUDGET,
    DEFAULT_SIGMA,
    DEFAULT_WIDTH,
    DOMAIN,
    METHOD_FOURIER,
    STREAM_PAIRS,
    STREAM_PI_LABELS,
    STREAM_REPLICATE,
)
from .exceptions import DataError, InvalidArgumentError
from .gmrf import sample_multivariate
from .gum import dgum_field, sample_labels_from_pi
from .lattice import neighbor_views
from .rng import derive_seed, generator
from .types import (
    BalanceReport,
    ClassSet,
    CovarianceSpec,
    GridShape,
    LabelField,
    MultivariateGmrfSpec,
    NeighborhoodSystem,
    RealField,
    RngSeed,
    SimilarityCurve,
)
from .utils import ordered_map

_LOGGER: Final = logging.getLogger(__name__)

T = TypeVar("T")

CURVE_COLUMNS: Final = ["x", "mean", "q10", "q90"]


def replicate(
    sample: Callable[[int], T],
    replicates: int,
    seed: RngSeed,
    threads: int | None = None,
) -> list[T]:
    """Call sample(seed_r) for r = 0..replicates-1 with seed_r = hash(seed, r)."""
    if replicates < 1:
        raise InvalidArgumentError(f"replicates must be positive, got {replicates}")
    seeds = [derive_seed(seed, STREAM_REPLICATE, r) for r in range(replicates)]
    return ordered_map(sample, seeds, threads)


def class_frequencies(x: LabelField, classes: ClassSet) -> np.ndarray:
    """Fraction of sites carrying each class value."""
    omegas = classes.as_array()
    labels = x.labels.ravel()
    foreign = ~np.isin(labels, omegas)
    if foreign.any():
        raise DataError(
            f"field holds labels outside {classes.omegas}: "
            f"{np.unique(labels[foreign]).tolist()}"
        )
    counts = np.array([np.count_nonzero(labels == w) for w in omegas])
    return counts / labels.size


def balance_report(fields: Sequence[LabelField], classes: ClassSet) -> BalanceReport:
    """Bias and replicate spread of the frequency estimator of the first class."""
    if len(fields) < 2:
        raise InvalidArgumentError(
            f"a balance report needs at least 2 replicates, got {len(fields)}"
        )
    shape = fields[0].shape
    if any(f.shape != shape for f in fields):
        raise DataError("all replicates must share one grid shape")
    frequencies = np.stack([class_frequencies(f, classes) for f in fields])
    mean = frequencies.mean(axis=0)
    return BalanceReport(
        classes=classes,
        mean_frequencies=mean,
        bias=float(abs(mean[0] - 1.0 / classes.K)),
        std=float(np.std(frequencies[:, 0], ddof=1)),
        replicates=len(fields),
        frequencies=frequencies,
    )


def _displacements(shape: GridShape, d_max: float, bins: int) -> pd.DataFrame:
    """One row per unordered integer displacement, with its bin and pair count."""
    # Largest distance that still rounds into the last bin.
    reach = math.ceil(d_max * (bins + 0.5) / bins)
    reach_r = min(shape.height - 1, reach)
    reach_c = min(shape.width - 1, reach)
    dr, dc = np.meshgrid(
        np.arange(0, reach_r + 1), np.arange(-reach_c, reach_c + 1), indexing="ij"
    )
    dr, dc = dr.ravel(), dc.ravel()
    # Half plane: each unordered pair of sites is seen once.
    keep = (dr > 0) | ((dr == 0) & (dc > 0))
    dr, dc = dr[keep], dc[keep]
    distance = np.hypot(dr, dc)
    j = np.rint(distance * bins / d_max).astype(np.int64)
    keep = (j >= 1) & (j <= bins)
    table = pd.DataFrame({"dr": dr[keep], "dc": dc[keep], "bin": j[keep]})
    table["weight"] = (shape.height - table["dr"]) * (shape.width - np.abs(table["dc"]))
    return table[table["weight"] > 0]


def _overlap(labels: np.ndarray, dr: int, dc: int) -> tuple[np.ndarray, np.ndarray]:
    height, width = labels.shape
    a = labels[: height - dr, max(0, -dc) : width - max(0, dc)]
    b = labels[dr:, max(0, dc) : width - max(0, -dc)]
    return a, b


def pairwise_similarity(
    x: LabelField,
    d_max: float,
    bins: int | None = None,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: RngSeed = 0,
) -> SimilarityCurve:
    """p(x_i = x_j | plane distance ~ d) per distance bin.

    Bins are centred at d_max * j / bins, j = 1..bins, and a pair joins the
    nearest centre. A bin with at most pair_budget pairs is counted
    exhaustively; larger bins are estimated from pair_budget pairs drawn
    uniformly from the bin.
    """
    shape = x.shape
    if not 0 < d_max < min(shape.dims):
        raise InvalidArgumentError(
            f"d_max must lie in (0, {min(shape.dims)}), got {d_max}"
        )
    bins = max(1, math.floor(d_max)) if bins is None else int(bins)
    if bins < 1 or pair_budget < 1:
        raise InvalidArgumentError("bins and pair_budget must be positive")

    labels = x.labels
    table = _displacements(shape, d_max, bins)
    distances, estimates, pairs = [], [], []
    for j, group in table.groupby("bin", sort=True):
        total = int(group["weight"].sum())
        if total <= pair_budget:
            equal = 0
            for dr, dc in zip(group["dr"], group["dc"]):
                a, b = _overlap(labels, int(dr), int(dc))
                equal += int(np.count_nonzero(a == b))
            used = total
        else:
            rng = generator(seed, STREAM_PAIRS, int(j))
            weight = group["weight"].to_numpy(dtype=np.float64)
            pick = rng.choice(len(group), size=pair_budget, p=weight / weight.sum())
            dr = group["dr"].to_numpy()[pick]
            dc = group["dc"].to_numpy()[pick]
            r0 = rng.integers(0, shape.height - dr)
            c0 = np.maximum(0, -dc) + rng.integers(0, shape.width - np.abs(dc))
            equal = int(np.count_nonzero(labels[r0, c0] == labels[r0 + dr, c0 + dc]))
            used = pair_budget
        distances.append(d_max * int(j) / bins)
        estimates.append(equal / used)
        pairs.append(used)
    _LOGGER.debug(
        "%s - pairwise_similarity: %s bins up to d=%s", DOMAIN, len(distances), d_max
    )
    return SimilarityCurve(np.array(distances), np.array(estimates), np.array(pairs))


def similarity_table(curves: Sequence[SimilarityCurve]) -> pd.DataFrame:
    """Aggregate replicate curves into long format (x, mean, q10, q90, pairs)."""
    frame = pd.concat(
        [
            pd.DataFrame({"x": c.distances, "estimate": c.estimates, "pairs": c.pairs})
            for c in curves
        ],
        ignore_index=True,
    )
    grouped = frame.groupby("x", sort=True)
    return pd.DataFrame(
        {
            "mean": grouped["estimate"].mean(),
            "q10": grouped["estimate"].quantile(DECILE_LOW / 100),
            "q90": grouped["estimate"].quantile(DECILE_HIGH / 100),
            "pairs": grouped["pairs"].sum(),
        }
    ).reset_index()


def neighbor_agreement(
    x: LabelField, system: NeighborhoodSystem = NeighborhoodSystem.EIGHT
) -> float:
    """Mean fraction of same-label neighbors over all sites."""
    views = neighbor_views(x.labels, system)
    return float(np.mean([np.mean(view == x.labels) for view in views]))


def _curve_row(x: float, values: Sequence[float]) -> dict:
    return {
        "x": x,
        "mean": float(np.mean(values)),
        "q10": float(np.percentile(values, DECILE_LOW)),
        "q90": float(np.percentile(values, DECILE_HIGH)),
    }


def phase_curve_pi(
    c_values: Sequence[float],
    base_spec: MultivariateGmrfSpec,
    replicates: int,
    seed: RngSeed,
    shape: GridShape | None = None,
    classes: ClassSet | None = None,
    system: NeighborhoodSystem = NeighborhoodSystem.EIGHT,
    threads: int | None = None,
) -> pd.DataFrame:
    """Neighbor agreement of labels drawn from pi^c, per c (mean and decile band).

    Replicate r shares its GMRF stack and its uniforms across all c, so the
    curve varies smoothly in c and tends to the DGUM agreement as c -> 0.
    """
    if replicates < 2:
        raise InvalidArgumentError(f"replicates must be at least 2, got {replicates}")
    shape = shape or GridShape(DEFAULT_HEIGHT, DEFAULT_WIDTH)
    classes = classes or ClassSet.default(base_spec.K)

    def agreements(replicate_seed: int) -> list[float]:
        z = sample_multivariate(shape, base_spec, replicate_seed, threads=1)
        label_seed = derive_seed(replicate_seed, STREAM_PI_LABELS)
        uniforms = generator(label_seed).random(shape.dims)
        return [
            neighbor_agreement(
                sample_labels_from_pi(z, c, classes, label_seed, uniforms), system
            )
            for c in c_values
        ]

    table = np.array(replicate(agreements, replicates, seed, threads))
    return pd.DataFrame(
        [_curve_row(c, table[:, i]) for i, c in enumerate(c_values)],
        columns=CURVE_COLUMNS,
    )


def phase_curve_kappa(
    kappa_values: Sequence[float],
    K_values: Sequence[int],
    replicates: int,
    seed: RngSeed,
    shape: GridShape | None = None,
    method: str = METHOD_FOURIER,
    nu: float = DEFAULT_NU,
    sigma: float = DEFAULT_SIGMA,
    bands: int = DEFAULT_BANDS,
    system: NeighborhoodSystem = NeighborhoodSystem.EIGHT,
    threads: int | None = None,
) -> pd.DataFrame:
    """Neighbor agreement of balanced isotropic DGUM samples per (K, kappa)."""
    if replicates < 2:
        raise InvalidArgumentError(f"replicates must be at least 2, got {replicates}")
    shape = shape or GridShape(DEFAULT_HEIGHT, DEFAULT_WIDTH)
    rows = []
    for K in K_values:
        classes = ClassSet.default(K)
        for kappa in kappa_values:
            spec = MultivariateGmrfSpec(
                K=K,
                covariances=(CovarianceSpec(sigma=sigma, kappa=kappa, nu=nu),),
                method=method,
                bands=bands,
            )
            values = replicate(
                lambda s, spec=spec, classes=classes: neighbor_agreement(
                    dgum_field(sample_multivariate(shape, spec, s, threads=1), classes),
                    system,
                ),
                replicates,
                seed,
                threads,
            )
            rows.append({"K": K, **_curve_row(kappa, values)})
            _LOGGER.debug(
                "%s - phase_curve_kappa: K=%s kappa=%s mean=%.4f",
                DOMAIN,
                K,
                kappa,
                rows[-1]["mean"],
            )
    return pd.DataFrame(rows, columns=["K", *CURVE_COLUMNS])


def empirical_covariance(
    fields: Sequence[RealField], max_lag: int, wrap: bool = True
) -> pd.DataFrame:
    """Covariance per axis-aligned lag 0..max_lag, averaged over rows and columns.

    Fields are centred at the per-site replicate mean and rescaled by
    R / (R - 1), which makes the estimate unbiased for R replicates.
    wrap=False only pairs sites that are max_lag apart without wraparound.
    """
    if len(fields) < 2:
        raise InvalidArgumentError(
            f"covariance estimation needs at least 2 replicates, got {len(fields)}"
        )
    shape = fields[0].shape
    if any(f.shape != shape for f in fields):
        raise DataError("all replicates must share one grid shape")
    if not 0 <= max_lag < min(shape.dims):
        raise InvalidArgumentError(
            f"max_lag must lie in [0, {min(shape.dims)}), got {max_lag}"
        )
    values = np.stack([f.values for f in fields])
    R = values.shape[0]
    centred = values - values.mean(axis=0)
    rows = []
    for lag in range(max_lag + 1):
        if wrap:
            total = np.sum(centred * np.roll(centred, -lag, axis=2)) + np.sum(
                centred * np.roll(centred, -lag, axis=1)
            )
            count = 2 * R * shape.n
        else:
            width, height = shape.width, shape.height
            total = np.sum(centred[:, :, : width - lag] * centred[:, :, lag:]) + np.sum(
                centred[:, : height - lag, :] * centred[:, lag:, :]
            )
            count = R * (height * (width - lag) + (height - lag) * width)
        rows.append(
            {"lag": lag, "covariance": float(total / count) * R / (R - 1), "pairs": count}
        )
    return pd.DataFrame(rows, columns=["lag", "covariance", "pairs"])
