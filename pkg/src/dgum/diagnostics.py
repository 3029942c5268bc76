"""Provenance report for dgum runs."""

from __future__ import annotations

import logging
import platform
from typing import Any, Final

from importlib_metadata import PackageNotFoundError, version

from .const import DOMAIN, ENV_THREADS
from .utils import thread_count

_LOGGER: Final = logging.getLogger(__name__)

MODULES: Final = [
    "dgum",
    "numpy",
    "scipy",
    "pandas",
    "voluptuous",
    "pyyaml",
    "colorlog",
    "importlib_metadata",
]


def module_versions() -> dict[str, str | None]:
    """Installed versions of dgum and its runtime dependencies."""
    versions: dict[str, str | None] = {}
    for name in MODULES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            _LOGGER.debug("%s - module_versions: %s is not installed", DOMAIN, name)
            versions[name] = None
    return versions


def get_provenance(command: str, config: dict[str, Any]) -> dict[str, Any]:
    """Return the resolved config plus environment details for one run."""
    _LOGGER.debug("%s - get_provenance: %s", DOMAIN, command)

    diag: dict[str, Any] = {"command": command}

    # Tuples become lists so the report is plain JSON.
    diag["config"] = {
        k: list(v) if isinstance(v, tuple) else v for k, v in sorted(config.items())
    }

    try:
        diag["modules"] = module_versions()
    except Exception as e:
        _LOGGER.error(
            "%s - get_provenance: Add python modules version failed: %s (%s.%s)",
            DOMAIN,
            str(e),
            e.__class__.__module__,
            type(e).__name__,
        )

    diag["runtime"] = {
        "python": platform.python_version(),
        "platform": platform.platform(),
        ENV_THREADS: thread_count(),
    }
    return diag
