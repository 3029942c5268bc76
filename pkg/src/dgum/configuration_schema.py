"""Configuration schema for dgum runs."""

from __future__ import annotations

import logging
import pkgutil
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Final

import voluptuous as vol
import yaml

from .const import (
    CONF_BANDS,
    CONF_BETA,
    CONF_BINS,
    CONF_C,
    CONF_C_VALUES,
    CONF_CLASSES,
    CONF_COLD,
    CONF_D_MAX,
    CONF_EMBEDDING,
    CONF_HEIGHT,
    CONF_INPUT,
    CONF_K,
    CONF_K_VALUES,
    CONF_KAPPA,
    CONF_KAPPA_VALUES,
    CONF_KAPPAS,
    CONF_MAX_ITERS,
    CONF_MAX_LAG,
    CONF_MEANS,
    CONF_METHOD,
    CONF_METHODS,
    CONF_NEIGHBORHOOD,
    CONF_NU,
    CONF_NUS,
    CONF_OUT,
    CONF_PAIR_BUDGET,
    CONF_PROVENANCE,
    CONF_REPLICATES,
    CONF_REPS,
    CONF_REPULSIVE,
    CONF_SEED,
    CONF_SIGMA,
    CONF_SIGMAS,
    CONF_SIZES,
    CONF_WIDTH,
    DEFAULT_BANDS,
    DEFAULT_BENCH_METHODS,
    DEFAULT_BENCH_REPS,
    DEFAULT_BENCH_SIZES,
    DEFAULT_BETA,
    DEFAULT_C,
    DEFAULT_D_MAX,
    DEFAULT_HEIGHT,
    DEFAULT_K,
    DEFAULT_KAPPA,
    DEFAULT_MAX_ITERS,
    DEFAULT_MAX_LAG,
    DEFAULT_NU,
    DEFAULT_PAIR_BUDGET,
    DEFAULT_REPLICATES,
    DEFAULT_SEED,
    DEFAULT_SIGMA,
    DEFAULT_WIDTH,
    DOMAIN,
    EMBEDDING_APPROXIMATE,
    EMBEDDING_MODES,
    GIBBS_METHODS,
    GMRF_METHODS,
    METHOD_CHROMATIC,
    METHOD_FOURIER,
    NEIGHBORHOOD_EIGHT,
    PRESETS_FILE,
    SAMPLER_METHODS,
    SUPPORTED_NEIGHBORHOODS,
)
from .exceptions import ConfigError

_LOGGER: Final = logging.getLogger(__name__)

_SEED_MAX: Final = 2**64 - 1


def _split(value: Any) -> list:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def float_list(value: Any) -> tuple[float, ...]:
    """Coerce "a,b,c" or a sequence into a tuple of floats."""
    try:
        return tuple(float(v) for v in _split(value))
    except (TypeError, ValueError) as e:
        raise vol.Invalid(f"expected a comma separated list of numbers: {value}") from e


def int_list(value: Any) -> tuple[int, ...]:
    """Coerce "a,b,c" or a sequence into a tuple of ints."""
    try:
        return tuple(int(v) for v in _split(value))
    except (TypeError, ValueError) as e:
        raise vol.Invalid(f"expected a comma separated list of integers: {value}") from e


def _choice_list(choices: list[str]):
    def validate(value: Any) -> tuple[str, ...]:
        items = tuple(str(v) for v in _split(value))
        unknown = [v for v in items if v not in choices]
        if unknown:
            raise vol.Invalid(f"expected values from {choices}, got {value}")
        return items

    return validate


def _each(validator):
    def validate(values: tuple) -> tuple:
        return tuple(validator(v) for v in values)

    return validate


positive_float = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
nonnegative_float = vol.All(vol.Coerce(float), vol.Range(min=0))
positive_int = vol.All(vol.Coerce(int), vol.Range(min=1))

MODEL_SCHEMA: Final = vol.Schema(
    {
        vol.Optional(CONF_METHOD, default=METHOD_FOURIER): vol.In(SAMPLER_METHODS),
        vol.Optional(CONF_K, default=DEFAULT_K): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_C, default=DEFAULT_C): positive_float,
        vol.Optional(CONF_BETA, default=DEFAULT_BETA): nonnegative_float,
        vol.Optional(CONF_SIGMA, default=DEFAULT_SIGMA): positive_float,
        vol.Optional(CONF_KAPPA, default=DEFAULT_KAPPA): positive_float,
        vol.Optional(CONF_NU, default=DEFAULT_NU): positive_float,
        vol.Optional(CONF_BANDS, default=DEFAULT_BANDS): positive_int,
        vol.Optional(CONF_HEIGHT, default=DEFAULT_HEIGHT): positive_int,
        vol.Optional(CONF_WIDTH, default=DEFAULT_WIDTH): positive_int,
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0, max=_SEED_MAX)
        ),
        vol.Optional(CONF_MEANS, default=()): float_list,
        vol.Optional(CONF_SIGMAS, default=()): vol.All(
            float_list, _each(positive_float)
        ),
        vol.Optional(CONF_KAPPAS, default=()): vol.All(
            float_list, _each(positive_float)
        ),
        vol.Optional(CONF_NUS, default=()): vol.All(float_list, _each(positive_float)),
        vol.Optional(CONF_CLASSES, default=()): int_list,
        vol.Optional(CONF_NEIGHBORHOOD, default=NEIGHBORHOOD_EIGHT): vol.In(
            SUPPORTED_NEIGHBORHOODS
        ),
        vol.Optional(CONF_EMBEDDING, default=EMBEDDING_APPROXIMATE): vol.In(
            EMBEDDING_MODES
        ),
        vol.Optional(CONF_MAX_ITERS, default=DEFAULT_MAX_ITERS): positive_int,
        vol.Optional(CONF_REPULSIVE, default=False): vol.Boolean(),
        vol.Optional(CONF_REPLICATES, default=DEFAULT_REPLICATES): positive_int,
        vol.Optional(CONF_OUT): str,
        vol.Optional(CONF_PROVENANCE, default=False): vol.Boolean(),
    },
    extra=vol.REMOVE_EXTRA,
)

GMRF_SCHEMA: Final = MODEL_SCHEMA.extend(
    {
        vol.Optional(CONF_METHOD, default=METHOD_FOURIER): vol.In(GMRF_METHODS),
    }
)

POTTS_SCHEMA: Final = MODEL_SCHEMA.extend(
    {
        vol.Optional(CONF_METHOD, default=METHOD_CHROMATIC): vol.In(GIBBS_METHODS),
    }
)

STATS_SCHEMA: Final = MODEL_SCHEMA.extend(
    {
        vol.Optional(CONF_REPLICATES, default=DEFAULT_REPLICATES): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_METHODS, default=()): _choice_list(SAMPLER_METHODS),
        vol.Optional(CONF_K_VALUES, default=()): vol.All(
            int_list, _each(vol.All(int, vol.Range(min=2)))
        ),
        vol.Optional(CONF_KAPPA_VALUES, default=(0.01, 0.1, 1.0, 10.0)): vol.All(
            float_list, _each(positive_float)
        ),
        vol.Optional(CONF_C_VALUES, default=(0.1, 0.5, 1.0, 2.0, 4.0)): vol.All(
            float_list, _each(positive_float)
        ),
        vol.Optional(CONF_D_MAX, default=DEFAULT_D_MAX): positive_float,
        vol.Optional(CONF_BINS): positive_int,
        vol.Optional(CONF_PAIR_BUDGET, default=DEFAULT_PAIR_BUDGET): positive_int,
        vol.Optional(CONF_MAX_LAG, default=DEFAULT_MAX_LAG): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(CONF_INPUT): str,
    }
)

BENCH_SCHEMA: Final = MODEL_SCHEMA.extend(
    {
        vol.Optional(CONF_SIZES, default=tuple(DEFAULT_BENCH_SIZES)): vol.All(
            int_list, _each(vol.All(int, vol.Range(min=1)))
        ),
        vol.Optional(CONF_METHODS, default=tuple(DEFAULT_BENCH_METHODS)): _choice_list(
            SAMPLER_METHODS
        ),
        vol.Optional(CONF_REPS, default=DEFAULT_BENCH_REPS): vol.All(
            vol.Coerce(int), vol.Range(min=3)
        ),
        vol.Optional(CONF_K_VALUES, default=()): vol.All(
            int_list, _each(vol.All(int, vol.Range(min=2)))
        ),
        vol.Optional(CONF_COLD, default=False): vol.Boolean(),
    }
)


def _check_lengths(config: dict) -> dict:
    """Per-class and per-component lists must agree with K."""
    K = config[CONF_K]
    if config[CONF_MEANS] and len(config[CONF_MEANS]) != K - 1:
        raise vol.Invalid(f"means needs {K - 1} values for K={K}")
    for key in (CONF_SIGMAS, CONF_KAPPAS, CONF_NUS):
        if len(config[key]) not in (0, 1, K - 1):
            raise vol.Invalid(f"{key} needs 1 or {K - 1} values for K={K}")
    classes = config[CONF_CLASSES]
    if classes:
        if len(classes) != K:
            raise vol.Invalid(f"classes needs {K} values for K={K}")
        if any(b <= a for a, b in zip(classes, classes[1:])) or min(classes) < 0:
            raise vol.Invalid("classes must be distinct, increasing and nonnegative")
    return config


def check_grid_range(config: Mapping[str, Any], key: str, extent: int) -> None:
    """A lag or distance option must stay below the smallest grid side."""
    value = config[key]
    if not value < extent:
        raise ConfigError(
            f"invalid configuration: {key} must be below the grid side {extent}, "
            f"got {value}"
        )


def normalize_key(key: str) -> str:
    """Flag and file keys accept either - or _ as separator."""
    return key.strip().lstrip("-").replace("-", "_")


def parse_config_file(path: Path | str) -> dict[str, str]:
    """Read flat key=value lines; # starts a comment."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    config: dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{number}: expected key=value, got {raw!r}")
        config[normalize_key(key)] = value.strip()
    _LOGGER.debug("%s - parse_config_file: %s keys from %s", DOMAIN, len(config), path)
    return config


def load_presets() -> dict[str, dict[str, Any]]:
    """Return the packaged experiment presets."""
    try:
        presets = yaml.safe_load(pkgutil.get_data(__package__, PRESETS_FILE)) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot load presets: {e}") from e
    return {
        name: {normalize_key(k): v for k, v in (values or {}).items()}
        for name, values in presets.items()
    }


def resolve_config(
    schema: vol.Schema,
    flags: Mapping[str, Any],
    preset: str | None = None,
    config_file: Path | str | None = None,
) -> dict[str, Any]:
    """Merge defaults < preset < config file < flags and validate the result."""
    merged: dict[str, Any] = {}
    if preset:
        presets = load_presets()
        if preset not in presets:
            raise ConfigError(
                f"unknown preset {preset!r}, expected one of {sorted(presets)}"
            )
        merged.update(presets[preset])
    if config_file:
        merged.update(parse_config_file(config_file))
    merged.update({normalize_key(k): v for k, v in flags.items() if v is not None})
    try:
        return vol.All(schema, _check_lengths)(merged)
    except vol.Invalid as e:
        raise ConfigError(f"invalid configuration: {e}") from e
