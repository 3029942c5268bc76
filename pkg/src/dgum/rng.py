"""Deterministic seeding and counter-based random streams.

Every random draw in dgum comes from a Philox generator keyed by the user
seed plus a tuple of integer stream keys (component, iteration, replicate,
...). The same (seed, keys) always yields the same stream, independent of
thread count or of which other streams were consumed before.
"""

from __future__ import annotations

import logging
from typing import Final

import numpy as np

from .const import DOMAIN
from .exceptions import InvalidArgumentError
from .types import RngSeed

_LOGGER: Final = logging.getLogger(__name__)

_SEED_LIMIT: Final = 2**64

__all__ = ["derive_seed", "generator", "seed_sequence"]


def _check_seed(seed: RngSeed) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer: {seed}")
    return seed


def seed_sequence(seed: RngSeed, *keys: int) -> np.random.SeedSequence:
    """Return the seed sequence of the stream (seed, *keys)."""
    return np.random.SeedSequence(
        _check_seed(seed), spawn_key=tuple(int(k) for k in keys)
    )


def generator(seed: RngSeed, *keys: int) -> np.random.Generator:
    """Return a Philox generator for the stream (seed, *keys)."""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *keys)))


def derive_seed(seed: RngSeed, *keys: int) -> int:
    """Hash (seed, *keys) into a new 64-bit seed."""
    derived = int(seed_sequence(seed, *keys).generate_state(1, np.uint64)[0])
    _LOGGER.debug("%s - derive_seed: %s%s -> %s", DOMAIN, seed, keys, derived)
    return derived
