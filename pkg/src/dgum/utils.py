"""Helper functions for dgum."""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Final, TypeVar

import numpy as np

from .const import DOMAIN, ENV_THREADS

_LOGGER: Final = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def thread_count(threads: int | None = None) -> int:
    """Resolve the worker thread count: explicit value, then env, then 1."""
    if threads is None:
        raw = os.environ.get(ENV_THREADS, "1")
        try:
            threads = int(raw)
        except ValueError:
            _LOGGER.warning(
                "%s - thread_count: ignoring invalid %s=%s", DOMAIN, ENV_THREADS, raw
            )
            threads = 1
    return max(1, int(threads))


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], threads: int | None = None
) -> list[R]:
    """Map fn over items, possibly on threads; results keep input order."""
    items = list(items)
    workers = min(thread_count(threads), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    _LOGGER.debug(
        "%s - ordered_map: %s items on %s threads", DOMAIN, len(items), workers
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def draw_categorical(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF categorical draw along axis 0.

    probs has shape (K, ...) and sums to one along axis 0; uniforms has the
    trailing shape and values in [0, 1). Returns class indices.
    """
    cdf = np.cumsum(probs, axis=0)
    idx = np.sum(cdf <= uniforms[np.newaxis], axis=0)
    return np.minimum(idx, probs.shape[0] - 1)
