"""Field files: binary PGM for label fields, raw float64 stacks for real fields."""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Final

import numpy as np
import yaml

from .const import DOMAIN, FIELD_FILE_MAGIC, PGM_MAXVAL
from .exceptions import DataError
from .types import ClassSet, GridShape, LabelField, RealFieldStack

_LOGGER: Final = logging.getLogger(__name__)

_PGM_HEADER: Final = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")
_FIELD_DTYPE: Final = "<f8"

KIND_LABELS: Final = "labels"
KIND_REAL: Final = "real"


def sidecar_path(path: Path | str) -> Path:
    """Path of the class header written next to a PGM file."""
    path = Path(path)
    return path.with_name(path.name + ".yaml")


def _gray_levels(classes: ClassSet) -> np.ndarray:
    omegas = classes.as_array()
    levels = (PGM_MAXVAL * omegas) // omegas[-1]
    if np.unique(levels).size != levels.size:
        raise DataError(
            f"class values {classes.omegas} collide on the {PGM_MAXVAL} gray levels"
        )
    return levels.astype(np.uint8)


def write_label_pgm(path: Path | str, x: LabelField, classes: ClassSet) -> Path:
    """Write x as P5 with gray floor(255 * omega / omega_max), plus a class sidecar."""
    path = Path(path)
    omegas = classes.as_array()
    index = np.searchsorted(omegas, x.labels)
    index = np.minimum(index, omegas.size - 1)
    if np.any(omegas[index] != x.labels):
        raise DataError(f"field holds labels outside {classes.omegas}")
    pixels = _gray_levels(classes)[index]
    header = f"P5\n{x.shape.width} {x.shape.height}\n{PGM_MAXVAL}\n".encode("ascii")
    path.write_bytes(header + pixels.tobytes())
    sidecar = {
        "kind": KIND_LABELS,
        "height": x.shape.height,
        "width": x.shape.width,
        "classes": list(classes.omegas),
    }
    sidecar_path(path).write_text(yaml.safe_dump(sidecar, sort_keys=False))
    _LOGGER.debug("%s - write_label_pgm: %s (%s classes)", DOMAIN, path, classes.K)
    return path


def read_label_pgm(path: Path | str) -> tuple[LabelField, ClassSet]:
    """Read a label PGM and its sidecar back into exact class values."""
    path = Path(path)
    data = path.read_bytes()
    match = _PGM_HEADER.match(data)
    if match is None:
        raise DataError(f"{path} is not a binary PGM file")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != PGM_MAXVAL:
        raise DataError(f"{path}: unsupported maxval {maxval}")
    payload = np.frombuffer(data, dtype=np.uint8, offset=match.end())
    if payload.size != width * height:
        raise DataError(
            f"{path}: expected {width * height} pixels, found {payload.size}"
        )
    try:
        sidecar = yaml.safe_load(sidecar_path(path).read_text())
        classes = ClassSet(tuple(sidecar["classes"]))
    except (OSError, KeyError, TypeError, yaml.YAMLError) as e:
        raise DataError(f"{path}: class sidecar is missing or malformed: {e}") from e
    lookup = np.full(PGM_MAXVAL + 1, -1, dtype=np.int64)
    lookup[_gray_levels(classes)] = classes.as_array()
    labels = lookup[payload].reshape(height, width)
    if np.any(labels < 0):
        raise DataError(f"{path}: gray levels do not match classes {classes.omegas}")
    return LabelField(GridShape(height, width), labels), classes


def write_field_stack(
    path: Path | str, stack: RealFieldStack, kind: str = KIND_REAL
) -> Path:
    """One-line text header, then little-endian float64 row-major components."""
    path = Path(path)
    header = (
        f"{FIELD_FILE_MAGIC} height={stack.shape.height} width={stack.shape.width} "
        f"components={stack.num_components} dtype={_FIELD_DTYPE} kind={kind}\n"
    )
    payload = np.ascontiguousarray(stack.values, dtype=_FIELD_DTYPE).tobytes()
    path.write_bytes(header.encode("ascii") + payload)
    _LOGGER.debug(
        "%s - write_field_stack: %s (%s components)",
        DOMAIN,
        path,
        stack.num_components,
    )
    return path


def read_field_header(path: Path | str) -> dict[str, str]:
    """Return the key=value pairs of a field file header."""
    with Path(path).open("rb") as f:
        line = f.readline().decode("ascii", errors="replace").split()
    if not line or line[0] != FIELD_FILE_MAGIC:
        raise DataError(f"{path} is not a {FIELD_FILE_MAGIC} file")
    try:
        return dict(token.split("=", 1) for token in line[1:])
    except ValueError as e:
        raise DataError(f"{path}: malformed header") from e


def read_field_stack(path: Path | str) -> RealFieldStack:
    """Read a stack written by write_field_stack, bit for bit."""
    path = Path(path)
    header = read_field_header(path)
    try:
        height = int(header["height"])
        width = int(header["width"])
        components = int(header["components"])
    except (KeyError, ValueError) as e:
        raise DataError(f"{path}: incomplete header {header}") from e
    if header.get("dtype", _FIELD_DTYPE) != _FIELD_DTYPE:
        raise DataError(f"{path}: unsupported dtype {header['dtype']}")
    data = path.read_bytes()
    offset = data.index(b"\n") + 1
    expected = height * width * components * np.dtype(_FIELD_DTYPE).itemsize
    if len(data) - offset != expected:
        raise DataError(
            f"{path}: payload has {len(data) - offset} bytes, expected {expected}"
        )
    values = np.frombuffer(data, dtype=_FIELD_DTYPE, offset=offset)
    return RealFieldStack(
        GridShape(height, width),
        values.reshape(components, height, width).astype(np.float64),
    )
