"""Toroidal grid geometry: neighborhoods, distances and graph colorings."""

from __future__ import annotations

import logging
import math
from typing import Final

import numpy as np

from .const import DOMAIN
from .exceptions import InvalidArgumentError
from .types import Coloring, GridShape, NeighborhoodSystem

_LOGGER: Final = logging.getLogger(__name__)

# (dr, dc) offsets in the fixed order N, S, W, E, NW, NE, SW, SE.
NEIGHBOR_OFFSETS: Final = {
    NeighborhoodSystem.FOUR: ((-1, 0), (1, 0), (0, -1), (0, 1)),
    NeighborhoodSystem.EIGHT: (
        (-1, 0),
        (1, 0),
        (0, -1),
        (0, 1),
        (-1, -1),
        (-1, 1),
        (1, -1),
        (1, 1),
    ),
}


def build_grid(height: int, width: int) -> GridShape:
    """Return the grid shape height x width."""
    if int(height) != height or int(width) != width:
        raise InvalidArgumentError(
            f"grid dimensions must be integers, got {height}x{width}"
        )
    return GridShape(int(height), int(width))


def neighbors(s: int, shape: GridShape, system: NeighborhoodSystem) -> list[int]:
    """Return the toroidal neighbors of site s in the fixed offset order."""
    row, col = shape.coords(s)
    return [
        ((row + dr) % shape.height) * shape.width + (col + dc) % shape.width
        for dr, dc in NEIGHBOR_OFFSETS[NeighborhoodSystem(system)]
    ]


def neighbor_table(shape: GridShape, system: NeighborhoodSystem) -> np.ndarray:
    """Return an (n, degree) array; row s lists neighbors(s) in order."""
    rows, cols = np.divmod(np.arange(shape.n), shape.width)
    return np.stack(
        [
            ((rows + dr) % shape.height) * shape.width + (cols + dc) % shape.width
            for dr, dc in NEIGHBOR_OFFSETS[NeighborhoodSystem(system)]
        ],
        axis=1,
    )


def neighbor_views(values: np.ndarray, system: NeighborhoodSystem) -> list[np.ndarray]:
    """Neighbor values per offset over the last two axes (torus wraparound).

    Entry j of the result holds, at (r, c), the value of the j-th neighbor of
    (r, c). Leading axes are treated as a batch.
    """
    return [
        np.roll(values, shift=(-dr, -dc), axis=(-2, -1))
        for dr, dc in NEIGHBOR_OFFSETS[NeighborhoodSystem(system)]
    ]


def torus_lag_distance(lag: tuple[int, int], shape: GridShape) -> float:
    """Euclidean length of the shortest wrapped displacement."""
    dr, dc = lag
    dr = min(dr, shape.height - dr)
    dc = min(dc, shape.width - dc)
    return math.hypot(dr, dc)


def torus_distance_grid(shape: GridShape) -> np.ndarray:
    """torus_lag_distance for every lag, as a (height, width) array."""
    dr = np.arange(shape.height)
    dc = np.arange(shape.width)
    dr = np.minimum(dr, shape.height - dr)
    dc = np.minimum(dc, shape.width - dc)
    return np.hypot(dr[:, np.newaxis], dc[np.newaxis, :])


def plane_distance(s: int, t: int, shape: GridShape) -> float:
    """Euclidean distance between the unwrapped (row, col) coordinates."""
    r0, c0 = shape.coords(s)
    r1, c1 = shape.coords(t)
    return math.hypot(r1 - r0, c1 - c0)


def _cycle_coloring(length: int) -> np.ndarray:
    """Proper coloring of a cycle: 2 colors if even, 3 if odd."""
    colors = np.arange(length) % 2
    if length % 2 == 1 and length > 1:
        colors[-1] = 2
    return colors


def _greedy_coloring(shape: GridShape, system: NeighborhoodSystem) -> np.ndarray:
    table = neighbor_table(shape, system)
    colors = np.full(shape.n, -1, dtype=np.int64)
    for s in range(shape.n):
        taken = {int(colors[t]) for t in table[s] if t != s and colors[t] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[s] = c
    return colors.reshape(shape.dims)


def color_grid(shape: GridShape, system: NeighborhoodSystem) -> Coloring:
    """Partition the sites into color classes of mutually independent sites.

    Even dimensions give the checkerboard (four) or 2x2 block (eight) pattern.
    Odd dimensions fall back to a cyclic-sum 3-coloring (four) or a first-fit
    greedy coloring in raster order (eight).
    """
    system = NeighborhoodSystem(system)
    rows = np.arange(shape.height)[:, np.newaxis]
    cols = np.arange(shape.width)[np.newaxis, :]
    even = shape.height % 2 == 0 and shape.width % 2 == 0
    if system is NeighborhoodSystem.FOUR and even:
        colors = (rows + cols) % 2
    elif system is NeighborhoodSystem.EIGHT and even:
        colors = 2 * (rows % 2) + cols % 2
    elif system is NeighborhoodSystem.FOUR:
        a = _cycle_coloring(shape.height)[:, np.newaxis]
        b = _cycle_coloring(shape.width)[np.newaxis, :]
        colors = (a + b) % 3
    else:
        _LOGGER.debug(
            "%s - color_grid: greedy fallback for %sx%s", DOMAIN, *shape.dims
        )
        colors = _greedy_coloring(shape, system)
    colors = np.broadcast_to(colors, shape.dims).astype(np.int64)
    # Compact ids so that num_colors counts only colors in use.
    used, colors = np.unique(colors, return_inverse=True)
    return Coloring(shape, system, colors.reshape(shape.dims), int(used.size))


def is_valid_coloring(coloring: Coloring) -> bool:
    """True iff no edge of the neighborhood system joins two same-color sites."""
    table = neighbor_table(coloring.shape, coloring.system)
    flat = coloring.colors.ravel()
    own = np.arange(coloring.shape.n)[:, np.newaxis]
    clash = (flat[table] == flat[:, np.newaxis]) & (table != own)
    return not bool(clash.any())
