"""Wall-clock benchmark of DGUM samplers against Gibbs sampling."""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from typing import Final

import numpy as np
import pandas as pd

from .const import (
    DEFAULT_KAPPA,
    DEFAULT_MAX_ITERS,
    DEFAULT_NU,
    DEFAULT_SIGMA,
    DOMAIN,
    GIBBS_METHODS,
    GMRF_METHODS,
    METHOD_SEQUENTIAL,
    STREAM_REPLICATE,
)
from .exceptions import CapacityError, EmbeddingError, InvalidArgumentError
from .gmrf import clear_caches
from .gum import sample_dgum
from .potts import chromatic_gibbs_sample, gibbs_sample
from .rng import derive_seed
from .types import ClassSet, CovarianceSpec, GridShape, MultivariateGmrfSpec, PottsSpec

_LOGGER: Final = logging.getLogger(__name__)

TIMING_COLUMNS: Final = [
    "method",
    "K",
    "size",
    "median",
    "q25",
    "q75",
    "iterations",
    "converged",
    "note",
]
RATIO_COLUMNS: Final = ["K", "size", "best_gibbs", "best_dgum", "ratio"]


def _sampler(method: str, shape: GridShape, K: int, beta: float, max_iters: int, **kw):
    """Return (run(seed) -> (iterations, converged)) for one method."""
    if method in GMRF_METHODS:
        spec = MultivariateGmrfSpec(
            K=K,
            covariances=(
                CovarianceSpec(
                    sigma=kw.get("sigma", DEFAULT_SIGMA),
                    kappa=kw.get("kappa", DEFAULT_KAPPA),
                    nu=kw.get("nu", DEFAULT_NU),
                ),
            ),
            method=method,
            **({"bands": kw["bands"]} if "bands" in kw else {}),
        )
        classes = ClassSet.default(K)

        def run(seed: int) -> tuple[int, bool]:
            sample_dgum(shape, spec, classes, seed, threads=1)
            return 1, True

        return run

    potts = PottsSpec(K=K, beta=beta)
    sample = gibbs_sample if method == METHOD_SEQUENTIAL else chromatic_gibbs_sample

    def run(seed: int) -> tuple[int, bool]:
        result = sample(shape, potts, seed, max_iters)
        return result.iterations, result.converged

    return run


def time_method(
    method: str,
    shape: GridShape,
    K: int,
    reps: int,
    seed: int,
    beta: float = 1.0,
    max_iters: int = DEFAULT_MAX_ITERS,
    cold: bool = False,
    **kw,
) -> dict:
    """Median and quartiles of the wall time of `reps` seeded runs.

    One untimed warm-up run comes first. With cold=False it leaves the spectrum
    and Cholesky factor cached, so DGUM timings exclude the one-off FFT and
    factorization of the covariance. With cold=True the caches are dropped
    before every timed run and that cost is included.
    Gibbs samplers are timed until their convergence rule fires.
    """
    run = _sampler(method, shape, K, beta, max_iters, **kw)
    run(derive_seed(seed, STREAM_REPLICATE, reps))
    times, iterations, converged = [], [], []
    for rep in range(reps):
        if cold:
            clear_caches()
        start = time.perf_counter()
        used, ok = run(derive_seed(seed, STREAM_REPLICATE, rep))
        times.append(time.perf_counter() - start)
        iterations.append(used)
        converged.append(ok)
    q25, median, q75 = np.percentile(times, [25, 50, 75])
    row = {
        "method": method,
        "K": K,
        "size": shape.height,
        "median": float(median),
        "q25": float(q25),
        "q75": float(q75),
        "iterations": float(np.median(iterations)),
        "converged": bool(all(converged)),
        "note": "" if all(converged) else "not converged within max_iters",
    }
    _LOGGER.info(
        "%s - time_method: %s K=%s at %sx%s median %.4fs%s",
        DOMAIN,
        method,
        K,
        shape.height,
        shape.width,
        row["median"],
        " (cold)" if cold else "",
    )
    return row


def speedup_ratios(timings: pd.DataFrame) -> pd.DataFrame:
    """Best Gibbs median over best DGUM median, per (K, size) with both kinds."""
    ok = timings.dropna(subset=["median"])
    keys = ["K", "size"]
    gibbs = ok[ok["method"].isin(GIBBS_METHODS)].groupby(keys)["median"].min()
    dgum = ok[ok["method"].isin(GMRF_METHODS)].groupby(keys)["median"].min()
    table = pd.concat({"best_gibbs": gibbs, "best_dgum": dgum}, axis=1).dropna()
    table["ratio"] = table["best_gibbs"] / table["best_dgum"]
    return table.reset_index()[RATIO_COLUMNS]


def benchmark(
    methods: Sequence[str],
    sizes: Sequence[int],
    K_values: Sequence[int],
    reps: int,
    seed: int,
    beta: float = 1.0,
    max_iters: int = DEFAULT_MAX_ITERS,
    cold: bool = False,
    **kw,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Timing table per (method, K, size) and speedup ratio per (K, size)."""
    if reps < 3:
        raise InvalidArgumentError(f"reps must be at least 3, got {reps}")
    if not methods or not sizes or not K_values:
        raise InvalidArgumentError(
            "benchmark needs at least one method, one size and one K"
        )
    unknown = [m for m in methods if m not in (*GMRF_METHODS, *GIBBS_METHODS)]
    if unknown:
        raise InvalidArgumentError(f"unknown benchmark methods: {unknown}")
    if any(K < 2 for K in K_values):
        raise InvalidArgumentError(f"K values must be at least 2, got {K_values}")
    rows = []
    for K in K_values:
        for size in sizes:
            shape = GridShape(size, size)
            for method in methods:
                try:
                    rows.append(
                        time_method(
                            method, shape, K, reps, seed, beta, max_iters, cold, **kw
                        )
                    )
                except (CapacityError, EmbeddingError) as e:
                    _LOGGER.warning(
                        "%s - benchmark: skipping %s K=%s: %s", DOMAIN, method, K, e
                    )
                    rows.append(
                        {
                            "method": method,
                            "K": K,
                            "size": size,
                            "median": np.nan,
                            "q25": np.nan,
                            "q75": np.nan,
                            "iterations": np.nan,
                            "converged": False,
                            "note": str(e),
                        }
                    )
    timings = pd.DataFrame(rows, columns=TIMING_COLUMNS)
    return timings, speedup_ratios(timings)


def bench_table(timings: pd.DataFrame, ratios: pd.DataFrame) -> pd.DataFrame:
    """Timings followed by one speedup row per (K, size), as one CSV-ready table."""
    speedups = pd.DataFrame(
        {
            "method": "speedup",
            "K": ratios["K"],
            "size": ratios["size"],
            "median": ratios["ratio"],
            "note": "best Gibbs median / best DGUM median",
        }
    )
    return pd.concat([timings, speedups], ignore_index=True)[TIMING_COLUMNS]
