"""dgum command line shell: sampling, statistics and benchmark commands."""

from __future__ import annotations

import argparse
import cmd
import json
import logging
import os
import shlex
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, Final

import colorlog
import numpy as np
import pandas as pd
import voluptuous as vol

from . import __version__
from .bench import bench_table, benchmark
from .configuration_schema import (
    BENCH_SCHEMA,
    GMRF_SCHEMA,
    POTTS_SCHEMA,
    STATS_SCHEMA,
    check_grid_range,
    resolve_config,
)
from .const import (
    CONF_BANDS,
    CONF_BETA,
    CONF_BINS,
    CONF_C,
    CONF_C_VALUES,
    CONF_CLASSES,
    CONF_COLD,
    CONF_CONFIG,
    CONF_D_MAX,
    CONF_EMBEDDING,
    CONF_HEIGHT,
    CONF_INPUT,
    CONF_K,
    CONF_K_VALUES,
    CONF_KAPPA,
    CONF_KAPPA_VALUES,
    CONF_KAPPAS,
    CONF_LOG_LEVEL,
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
    CONF_PRESET,
    CONF_PROVENANCE,
    CONF_REPLICATES,
    CONF_REPS,
    CONF_REPULSIVE,
    CONF_SEED,
    CONF_SIGMA,
    CONF_SIGMAS,
    CONF_SIZES,
    CONF_WIDTH,
    DEFAULT_LOG_LEVEL,
    DOMAIN,
    ENV_LOG_LEVEL,
    GMRF_METHODS,
    METHOD_SEQUENTIAL,
    METHOD_SPECTRAL,
    STREAM_PAIRS,
)
from .covariance import matern
from .diagnostics import get_provenance
from .exceptions import ConfigError, DgumError
from .fieldio import read_label_pgm, write_field_stack, write_label_pgm
from .gmrf import sample_gmrf, sample_multivariate
from .gum import gum_field, pi_map, sample_dgum, sample_labels_from_pi, simplex_vertices
from .potts import chromatic_gibbs_sample, gibbs_sample
from .rng import derive_seed
from .stats import (
    balance_report,
    empirical_covariance,
    pairwise_similarity,
    phase_curve_kappa,
    phase_curve_pi,
    replicate,
    similarity_table,
)
from .types import (
    ClassSet,
    CovarianceSpec,
    GridShape,
    LabelField,
    MultivariateGmrfSpec,
    NeighborhoodSystem,
    PottsSpec,
    RealFieldStack,
)

_LOGGER: Final = logging.getLogger(__name__)

EXIT_OK: Final = 0
EXIT_FAILURE: Final = 1
EXIT_USAGE: Final = 2

STATISTICS: Final = ["balance", "pairwise", "phase-c", "phase-kappa", "covariance"]


#### Utility Functions ####


def setup_logging(level: str | None = None) -> None:
    """Install one coloured handler on the root logger."""
    level = (level or os.environ.get(ENV_LOG_LEVEL, DEFAULT_LOG_LEVEL)).upper()
    handler = colorlog.StreamHandler()
    handler.setFormatter(
        colorlog.ColoredFormatter(
            "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"
        )
    )
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every command; unset flags stay None."""
    parser.add_argument("--preset")
    parser.add_argument("--config")
    parser.add_argument("--log-level")
    parser.add_argument("--method")
    parser.add_argument("--K")
    parser.add_argument("--c")
    parser.add_argument("--beta")
    parser.add_argument("--sigma")
    parser.add_argument("--kappa")
    parser.add_argument("--nu")
    parser.add_argument("--bands")
    parser.add_argument("--height")
    parser.add_argument("--width")
    parser.add_argument("--seed")
    parser.add_argument("--means", help="comma separated component means")
    parser.add_argument("--sigmas", help="per-component sigma list")
    parser.add_argument("--kappas", help="per-component kappa list")
    parser.add_argument("--nus", help="per-component nu list")
    parser.add_argument("--classes", help="comma separated class values")
    parser.add_argument("--neighborhood")
    parser.add_argument("--embedding")
    parser.add_argument("--max-iters")
    parser.add_argument("--repulsive", action="store_true", default=None)
    parser.add_argument("--replicates")
    parser.add_argument("--out")
    parser.add_argument("--provenance", action="store_true", default=None)


def _add_stats_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--methods")
    parser.add_argument("--K-values", dest="K_values")
    parser.add_argument("--kappa-values")
    parser.add_argument("--c-values")
    parser.add_argument("--d-max")
    parser.add_argument("--bins")
    parser.add_argument("--pair-budget")
    parser.add_argument("--max-lag")
    parser.add_argument("--input")


def _add_bench_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sizes")
    parser.add_argument("--methods")
    parser.add_argument("--reps")
    parser.add_argument("--K-values", dest="K_values")
    parser.add_argument("--cold", action="store_true", default=None)


def _shape(config: dict) -> GridShape:
    return GridShape(config[CONF_HEIGHT], config[CONF_WIDTH])


def _covariances(config: dict) -> tuple[CovarianceSpec, ...]:
    """One shared covariance, or one per component when a list has K-1 values."""
    lists = {
        "sigma": (config[CONF_SIGMAS], config[CONF_SIGMA]),
        "kappa": (config[CONF_KAPPAS], config[CONF_KAPPA]),
        "nu": (config[CONF_NUS], config[CONF_NU]),
    }
    count = max(1, *(len(values) for values, _ in lists.values()))

    def pick(values: tuple, default: float, i: int) -> float:
        if len(values) > 1:
            return values[i]
        return values[0] if values else default

    return tuple(
        CovarianceSpec(
            **{name: pick(values, default, i) for name, (values, default) in lists.items()}
        )
        for i in range(count)
    )


def _gmrf_spec(
    config: dict, K: int | None = None, method: str | None = None
) -> MultivariateGmrfSpec:
    """GMRF spec from the config; any other K gets a balanced isotropic spec."""
    K = K or config[CONF_K]
    if K == config[CONF_K]:
        means, covariances = config[CONF_MEANS], _covariances(config)
    else:
        means, covariances = (), _covariances(config)[:1]
    return MultivariateGmrfSpec(
        K=K,
        means=means,
        covariances=covariances,
        method=method or config[CONF_METHOD],
        bands=config[CONF_BANDS],
        embedding=config[CONF_EMBEDDING],
    )


def _classes(config: dict, K: int | None = None) -> ClassSet:
    K = K or config[CONF_K]
    if config[CONF_CLASSES] and K == config[CONF_K]:
        return ClassSet(config[CONF_CLASSES])
    return ClassSet.default(K)


def _relabel(x: LabelField, classes: ClassSet) -> LabelField:
    """Map Potts class indices 0..K-1 onto the class values."""
    return LabelField(x.shape, classes.as_array()[x.labels])


def _potts_spec(config: dict, K: int | None = None) -> PottsSpec:
    return PottsSpec(
        K=K or config[CONF_K],
        beta=config[CONF_BETA],
        system=NeighborhoodSystem(config[CONF_NEIGHBORHOOD]),
        attractive=not config[CONF_REPULSIVE],
    )


def _require_gmrf(config: dict) -> str:
    method = config[CONF_METHOD]
    if method not in GMRF_METHODS:
        raise ConfigError(f"method must be one of {GMRF_METHODS}, got {method}")
    return method


def _require_out(config: dict) -> Path:
    if not config.get(CONF_OUT):
        raise ConfigError("--out is required for this command")
    return Path(config[CONF_OUT])


def _label_sample(config: dict, method: str, K: int, seed: int) -> LabelField:
    """One label field from a DGUM or Gibbs sampler."""
    shape = _shape(config)
    if method in GMRF_METHODS:
        spec = _gmrf_spec(config, K, method)
        return sample_dgum(shape, spec, _classes(config, K), seed, threads=1)
    sample = gibbs_sample if method == METHOD_SEQUENTIAL else chromatic_gibbs_sample
    result = sample(shape, _potts_spec(config, K), seed, config[CONF_MAX_ITERS])
    return _relabel(result.field, _classes(config, K))


def _write_table(table: pd.DataFrame, config: dict) -> str:
    out = config.get(CONF_OUT)
    if out:
        table.to_csv(out, index=False)
        return out
    sys.stdout.write(table.to_csv(index=False))
    return "<stdout>"


#### Commands ####


def cmd_sample_gmrf(config: dict) -> str:
    out = _require_out(config)
    shape = _shape(config)
    field = sample_gmrf(
        shape,
        _covariances(config)[0],
        config[CONF_SEED],
        method=_require_gmrf(config),
        bands=config[CONF_BANDS],
        embedding=config[CONF_EMBEDDING],
    )
    write_field_stack(out, RealFieldStack(shape, field.values[np.newaxis]), kind="gmrf")
    return str(out)


def cmd_sample_dgum(config: dict) -> str:
    out = _require_out(config)
    _require_gmrf(config)
    classes = _classes(config)
    x = sample_dgum(_shape(config), _gmrf_spec(config), classes, config[CONF_SEED])
    write_label_pgm(out, x, classes)
    return str(out)


def cmd_sample_gum(config: dict) -> str:
    out = _require_out(config)
    _require_gmrf(config)
    z = sample_multivariate(_shape(config), _gmrf_spec(config), config[CONF_SEED])
    phi = gum_field(z, config[CONF_C], _classes(config))
    write_field_stack(out, RealFieldStack(z.shape, phi.values[np.newaxis]), kind="gum")
    return str(out)


def cmd_sample_pi_labels(config: dict) -> str:
    out = _require_out(config)
    _require_gmrf(config)
    classes = _classes(config)
    z = sample_multivariate(_shape(config), _gmrf_spec(config), config[CONF_SEED])
    x = sample_labels_from_pi(z, config[CONF_C], classes, config[CONF_SEED])
    write_label_pgm(out, x, classes)
    return str(out)


def cmd_export_barycentric(config: dict) -> str:
    _require_gmrf(config)
    K = config[CONF_K]
    z = sample_multivariate(_shape(config), _gmrf_spec(config), config[CONF_SEED])
    soft = pi_map(z, config[CONF_C], simplex_vertices(K - 1))
    rows, cols = np.divmod(np.arange(z.shape.n), z.shape.width)
    table = pd.DataFrame({"row": rows, "col": cols})
    for p, component in enumerate(z.values):
        table[f"z_{p}"] = component.ravel()
    for k, probs in enumerate(soft.values):
        table[f"pi_{k}"] = probs.ravel()
    return _write_table(table, config)


def cmd_sample_potts(config: dict) -> str:
    out = _require_out(config)
    sample = (
        gibbs_sample if config[CONF_METHOD] == METHOD_SEQUENTIAL else chromatic_gibbs_sample
    )
    result = sample(
        _shape(config), _potts_spec(config), config[CONF_SEED], config[CONF_MAX_ITERS]
    )
    _LOGGER.info(
        "%s - sample-potts: %s sweeps, converged=%s",
        DOMAIN,
        result.iterations,
        result.converged,
    )
    classes = _classes(config)
    write_label_pgm(out, _relabel(result.field, classes), classes)
    return str(out)


def stats_balance(config: dict) -> str:
    methods = config[CONF_METHODS] or (config[CONF_METHOD],)
    K_values = config[CONF_K_VALUES] or (config[CONF_K],)
    rows = []
    for method in methods:
        for K in K_values:
            fields = replicate(
                lambda seed, method=method, K=K: _label_sample(config, method, K, seed),
                config[CONF_REPLICATES],
                config[CONF_SEED],
            )
            report = balance_report(fields, _classes(config, K))
            rows.append(
                {
                    "method": method,
                    "K": K,
                    "replicates": report.replicates,
                    "f0_mean": report.mean_frequencies[0],
                    "bias": report.bias,
                    "std": report.std,
                    "mean_frequencies": ";".join(
                        f"{f:.6f}" for f in report.mean_frequencies
                    ),
                }
            )
    return _write_table(pd.DataFrame(rows), config)


def stats_pairwise(config: dict) -> str:
    if config.get(CONF_INPUT):
        field, _ = read_label_pgm(config[CONF_INPUT])
        check_grid_range(config, CONF_D_MAX, min(field.shape.dims))
        fields = [field]
    else:
        check_grid_range(config, CONF_D_MAX, min(_shape(config).dims))
        fields = replicate(
            lambda seed: _label_sample(config, config[CONF_METHOD], config[CONF_K], seed),
            config[CONF_REPLICATES],
            config[CONF_SEED],
        )
    curves = [
        pairwise_similarity(
            x,
            config[CONF_D_MAX],
            config.get(CONF_BINS),
            config[CONF_PAIR_BUDGET],
            derive_seed(config[CONF_SEED], STREAM_PAIRS, r),
        )
        for r, x in enumerate(fields)
    ]
    return _write_table(similarity_table(curves), config)


def stats_phase_c(config: dict) -> str:
    _require_gmrf(config)
    table = phase_curve_pi(
        config[CONF_C_VALUES],
        _gmrf_spec(config),
        config[CONF_REPLICATES],
        config[CONF_SEED],
        shape=_shape(config),
        classes=_classes(config),
        system=NeighborhoodSystem(config[CONF_NEIGHBORHOOD]),
    )
    return _write_table(table, config)


def stats_phase_kappa(config: dict) -> str:
    table = phase_curve_kappa(
        config[CONF_KAPPA_VALUES],
        config[CONF_K_VALUES] or (config[CONF_K],),
        config[CONF_REPLICATES],
        config[CONF_SEED],
        shape=_shape(config),
        method=_require_gmrf(config),
        nu=config[CONF_NU],
        sigma=config[CONF_SIGMA],
        bands=config[CONF_BANDS],
        system=NeighborhoodSystem(config[CONF_NEIGHBORHOOD]),
    )
    return _write_table(table, config)


def stats_covariance(config: dict) -> str:
    method = _require_gmrf(config)
    shape = _shape(config)
    check_grid_range(config, CONF_MAX_LAG, min(shape.dims))
    spec = _covariances(config)[0]
    fields = replicate(
        lambda seed: sample_gmrf(
            shape,
            spec,
            seed,
            method=method,
            bands=config[CONF_BANDS],
            embedding=config[CONF_EMBEDDING],
        ),
        config[CONF_REPLICATES],
        config[CONF_SEED],
    )
    table = empirical_covariance(
        fields, config[CONF_MAX_LAG], wrap=method != METHOD_SPECTRAL
    )
    table["matern"] = matern(table["lag"].to_numpy(dtype=np.float64), spec)
    return _write_table(table, config)


def cmd_bench(config: dict) -> str:
    timings, ratios = benchmark(
        config[CONF_METHODS],
        config[CONF_SIZES],
        config[CONF_K_VALUES] or (config[CONF_K],),
        config[CONF_REPS],
        config[CONF_SEED],
        beta=config[CONF_BETA],
        max_iters=config[CONF_MAX_ITERS],
        cold=config[CONF_COLD],
        sigma=config[CONF_SIGMA],
        kappa=config[CONF_KAPPA],
        nu=config[CONF_NU],
        bands=config[CONF_BANDS],
    )
    for row in ratios.itertuples():
        _LOGGER.info(
            "%s - bench: K=%s %sx%s speedup %.1f",
            DOMAIN,
            row.K,
            row.size,
            row.size,
            row.ratio,
        )
    return _write_table(bench_table(timings, ratios), config)


STATS_COMMANDS: Final[dict[str, Callable[[dict], str]]] = {
    "balance": stats_balance,
    "pairwise": stats_pairwise,
    "phase-c": stats_phase_c,
    "phase-kappa": stats_phase_kappa,
    "covariance": stats_covariance,
}


#### Shell Functions ####


class DgumShell(cmd.Cmd):
    intro = f"Welcome to the dgum shell {__version__}.   Type help or ? to list commands.\n"
    prompt = "dgum> "
    exit_code = EXIT_OK

    def postloop(self) -> None:
        print()
        return super().postloop()

    def emptyline(self) -> bool:
        return False

    def precmd(self, line: str) -> str:
        """Accept hyphenated command names (sample-dgum -> sample_dgum)."""
        name, sep, rest = line.strip().partition(" ")
        return name.replace("-", "_") + sep + rest

    def default(self, line: str) -> bool | None:
        print(f"ERROR: Unknown command: {line.split(' ')[0]}", file=sys.stderr)
        self.exit_code = EXIT_USAGE
        return None

    def _execute(
        self,
        name: str,
        arg: str,
        schema: vol.Schema,
        handler: Callable[[dict], str],
        add_arguments: Callable[[argparse.ArgumentParser], None] | None = None,
    ) -> None:
        parser = argparse.ArgumentParser(prog=f"{DOMAIN} {name}")
        _add_model_arguments(parser)
        if add_arguments:
            add_arguments(parser)
        try:
            args = parser.parse_args(shlex.split(arg))
        except SystemExit as e:
            self.exit_code = EXIT_OK if e.code == 0 else EXIT_USAGE
            return
        flags: dict[str, Any] = vars(args)
        preset = flags.pop(CONF_PRESET)
        config_file = flags.pop(CONF_CONFIG)
        log_level = flags.pop(CONF_LOG_LEVEL)
        if log_level:
            logging.getLogger().setLevel(log_level.upper())
        self.exit_code = run_command(
            name, parser, schema, handler, flags, preset, config_file
        )

    def do_EOF(self, arg: str) -> bool | None:
        """Exit the shell"""
        return True

    def do_exit(self, arg: str) -> bool | None:
        """
        Exit the shell
        Usage: exit
        """
        return True

    def do_sample_gmrf(self, arg: str) -> bool | None:
        """
        Sample one zero-mean Matérn field and write it as a field file
        Usage: sample-gmrf --method <fourier|spectral|cholesky> --out <path> [flags...]
        """
        self._execute("sample-gmrf", arg, GMRF_SCHEMA, cmd_sample_gmrf)

    def do_sample_dgum(self, arg: str) -> bool | None:
        """
        Sample a DGUM label field and write it as PGM (+ class sidecar)
        Usage: sample-dgum --K <K> --method <fourier|spectral|cholesky> --out <path> [flags...]
        """
        self._execute("sample-dgum", arg, GMRF_SCHEMA, cmd_sample_dgum)

    def do_sample_gum(self, arg: str) -> bool | None:
        """
        Sample the soft GUM field for a given c and write it as a field file
        Usage: sample-gum --K <K> --c <c> --out <path> [flags...]
        """
        self._execute("sample-gum", arg, GMRF_SCHEMA, cmd_sample_gum)

    def do_sample_pi_labels(self, arg: str) -> bool | None:
        """
        Sample labels independently per site from the softmax probabilities
        Usage: sample-pi-labels --K <K> --c <c> --out <path> [flags...]
        """
        self._execute("sample-pi-labels", arg, GMRF_SCHEMA, cmd_sample_pi_labels)

    def do_export_barycentric(self, arg: str) -> bool | None:
        """
        Export per-site GMRF coordinates and class probabilities as CSV
        Usage: export-barycentric --K <K> --c <c> [--out <path>] [flags...]
        """
        self._execute("export-barycentric", arg, GMRF_SCHEMA, cmd_export_barycentric)

    def do_sample_potts(self, arg: str) -> bool | None:
        """
        Sample a Potts field by Gibbs sampling until convergence
        Usage: sample-potts --method <sequential|chromatic> --K <K> --beta <beta> --out <path>
        """
        self._execute("sample-potts", arg, POTTS_SCHEMA, cmd_sample_potts)

    def do_stats(self, arg: str) -> bool | None:
        """
        Compute validation statistics and write them as CSV
        Usage: stats <balance|pairwise|phase-c|phase-kappa|covariance> [flags...]
        """
        statistic, _, rest = arg.strip().partition(" ")
        if statistic not in STATS_COMMANDS:
            print(
                f"ERROR: Unknown statistic: {statistic!r}, expected one of {STATISTICS}",
                file=sys.stderr,
            )
            self.exit_code = EXIT_USAGE
            return
        self._execute(
            f"stats {statistic}",
            rest,
            STATS_SCHEMA,
            STATS_COMMANDS[statistic],
            _add_stats_arguments,
        )

    def complete_stats(self, text, line, begidx, endidx):
        return [s for s in STATISTICS if s.startswith(text)]

    def do_bench(self, arg: str) -> bool | None:
        """
        Time DGUM samplers against Gibbs sampling
        Usage: bench --sizes 64,128,256 --K-values 2,7 --methods fourier,spectral,chromatic --reps 10 [--cold] [--out <csv>]
        """
        self._execute("bench", arg, BENCH_SCHEMA, cmd_bench, _add_bench_arguments)


def run_command(
    name: str,
    parser: argparse.ArgumentParser,
    schema: vol.Schema,
    handler: Callable[[dict], str],
    flags: dict[str, Any],
    preset: str | None = None,
    config_file: str | None = None,
) -> int:
    """Resolve the config, run one command and map failures to exit codes."""
    try:
        config = resolve_config(schema, flags, preset, config_file)
    except ConfigError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    provenance = get_provenance(name, config)
    _LOGGER.info("%s - %s: config %s", DOMAIN, name, json.dumps(provenance))
    try:
        written = handler(config)
    except ConfigError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DgumError, OSError) as e:
        _LOGGER.error(
            "%s - %s: failed: %s (%s.%s)",
            DOMAIN,
            name,
            str(e),
            e.__class__.__module__,
            type(e).__name__,
        )
        return EXIT_FAILURE
    if config[CONF_PROVENANCE] and config.get(CONF_OUT):
        Path(f"{config[CONF_OUT]}.json").write_text(json.dumps(provenance, indent=2))
    _LOGGER.info("%s - %s: wrote %s", DOMAIN, name, written)
    return EXIT_OK


def run(argv: list[str]) -> int:
    """Run one command line; returns the process exit code."""
    if not argv:
        print(f"usage: {DOMAIN} <command> [flags...]", file=sys.stderr)
        return EXIT_USAGE
    shell = DgumShell()
    shell.onecmd(shell.precmd(shlex.join(argv)))
    return shell.exit_code


def main():
    setup_logging()
    if len(sys.argv) < 2:
        DgumShell().cmdloop()
        return
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        try:
            sys.exit(0)
        except SystemExit:
            os._exit(0)
