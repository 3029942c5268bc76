"""Tests for dgum.bench."""

from __future__ import annotations

import numpy as np
import pandas as pd
import pytest

from dgum.bench import (
    RATIO_COLUMNS,
    TIMING_COLUMNS,
    bench_table,
    benchmark,
    speedup_ratios,
    time_method,
)
from dgum.exceptions import EmbeddingError, InvalidArgumentError
from dgum.gmrf import _sqrt_spectrum
from dgum.types import GridShape


def test_time_method_reports_quartiles():
    row = time_method("fourier", GridShape(16, 16), 3, reps=3, seed=0, kappa=1.0)
    assert set(row) == set(TIMING_COLUMNS)
    assert row["K"] == 3
    assert row["q25"] <= row["median"] <= row["q75"]
    assert row["iterations"] == 1
    assert row["converged"]


def test_time_method_counts_gibbs_sweeps():
    row = time_method("chromatic", GridShape(8, 8), 2, reps=3, seed=0, max_iters=5)
    assert 1 <= row["iterations"] <= 5
    if not row["converged"]:
        assert row["note"]


@pytest.mark.parametrize(("cold", "clears"), [(False, 0), (True, 4)])
def test_time_method_cold_runs_drop_caches(monkeypatch, cold, clears):
    calls = []
    monkeypatch.setattr("dgum.bench.clear_caches", lambda: calls.append(1))
    time_method("fourier", GridShape(8, 8), 2, reps=4, seed=0, cold=cold, kappa=1.0)
    assert len(calls) == clears


def test_cold_run_recomputes_the_spectrum():
    shape = GridShape(12, 12)
    time_method("fourier", shape, 2, reps=3, seed=0, kappa=1.5)
    misses = _sqrt_spectrum.cache_info().misses
    time_method("fourier", shape, 2, reps=3, seed=0, kappa=1.5)
    assert _sqrt_spectrum.cache_info().misses == misses
    time_method("fourier", shape, 2, reps=3, seed=0, cold=True, kappa=1.5)
    assert _sqrt_spectrum.cache_info().misses == misses + 3


def test_benchmark_tables():
    timings, ratios = benchmark(
        ["fourier", "chromatic"], [8, 12], [2], 3, seed=1, kappa=1.0
    )
    assert list(timings.columns) == TIMING_COLUMNS
    assert list(ratios.columns) == RATIO_COLUMNS
    assert len(timings) == 4
    assert list(ratios["size"]) == [8, 12]
    np.testing.assert_allclose(
        ratios["ratio"], ratios["best_gibbs"] / ratios["best_dgum"]
    )


def test_benchmark_over_two_class_counts():
    timings, ratios = benchmark(
        ["fourier", "chromatic"], [8], [2, 7], 3, seed=4, max_iters=5, kappa=1.0
    )
    assert list(timings["K"]) == [2, 2, 7, 7]
    assert list(timings["method"]) == ["fourier", "chromatic"] * 2
    assert list(ratios["K"]) == [2, 7]
    assert list(ratios["size"]) == [8, 8]
    table = bench_table(timings, ratios)
    speedup = table[table["method"] == "speedup"]
    assert list(speedup["K"]) == [2, 7]


def test_benchmark_skips_oversized_cholesky():
    timings, ratios = benchmark(["cholesky"], [65], [2], 3, seed=0)
    row = timings.iloc[0]
    assert np.isnan(row["median"])
    assert row["K"] == 2
    assert not row["converged"]
    assert row["note"]
    assert ratios.empty


@pytest.mark.parametrize(
    ("methods", "sizes", "K_values", "reps"),
    [
        (["fourier"], [8], [2], 2),
        ([], [8], [2], 3),
        (["fourier"], [], [2], 3),
        (["bogus"], [8], [2], 3),
        (["fourier"], [8], [], 3),
        (["fourier"], [8], [1], 3),
    ],
)
def test_benchmark_rejects_bad_arguments(methods, sizes, K_values, reps):
    with pytest.raises(InvalidArgumentError):
        benchmark(methods, sizes, K_values, reps, seed=0)


def test_speedup_uses_best_of_each_family():
    timings = pd.DataFrame(
        {
            "method": ["fourier", "spectral", "sequential", "chromatic", "fourier"],
            "K": [2, 2, 2, 2, 2],
            "size": [64, 64, 64, 64, 128],
            "median": [0.02, 0.05, 9.0, 1.0, 0.1],
        }
    )
    ratios = speedup_ratios(timings)
    assert list(ratios["size"]) == [64]
    assert ratios["ratio"][0] == pytest.approx(50.0)


def test_speedup_keeps_class_counts_apart():
    timings = pd.DataFrame(
        {
            "method": ["fourier", "chromatic", "fourier", "chromatic"],
            "K": [2, 2, 7, 7],
            "size": [64, 64, 64, 64],
            "median": [0.01, 1.0, 0.04, 2.0],
        }
    )
    ratios = speedup_ratios(timings)
    assert list(ratios["K"]) == [2, 7]
    np.testing.assert_allclose(ratios["ratio"], [100.0, 50.0])


def test_bench_table_appends_speedup_rows():
    timings, ratios = benchmark(["spectral", "sequential"], [6], [2], 3, seed=2, bands=50)
    table = bench_table(timings, ratios)
    assert list(table.columns) == TIMING_COLUMNS
    speedup = table[table["method"] == "speedup"]
    assert len(speedup) == 1
    assert speedup["K"].iloc[0] == 2
    assert speedup["median"].iloc[0] == pytest.approx(ratios["ratio"][0])


def test_benchmark_skips_unembeddable_grid(monkeypatch):
    def fail(*args, **kwargs):
        raise EmbeddingError("negative eigenvalue mass 0.2 exceeds 0.05")

    monkeypatch.setattr("dgum.bench.sample_dgum", fail)
    timings, _ = benchmark(["fourier"], [8], [2], 3, seed=0)
    assert np.isnan(timings["median"][0])
    assert timings["note"][0]


@pytest.mark.slow
def test_dgum_is_ten_times_faster_than_gibbs_at_256():
    timings, ratios = benchmark(["fourier", "chromatic"], [256], [2], 10, seed=0)
    assert timings["median"].notna().all()
    assert ratios["ratio"][0] >= 10.0
