"""Constants for dgum."""

from __future__ import annotations

from typing import Final

DOMAIN: Final = "dgum"

NEIGHBORHOOD_FOUR: Final = "four"
NEIGHBORHOOD_EIGHT: Final = "eight"
SUPPORTED_NEIGHBORHOODS: Final = [NEIGHBORHOOD_FOUR, NEIGHBORHOOD_EIGHT]

METHOD_FOURIER: Final = "fourier"
METHOD_SPECTRAL: Final = "spectral"
METHOD_CHOLESKY: Final = "cholesky"
GMRF_METHODS: Final = [METHOD_FOURIER, METHOD_SPECTRAL, METHOD_CHOLESKY]

METHOD_SEQUENTIAL: Final = "sequential"
METHOD_CHROMATIC: Final = "chromatic"
GIBBS_METHODS: Final = [METHOD_SEQUENTIAL, METHOD_CHROMATIC]

EMBEDDING_EXACT: Final = "exact"
EMBEDDING_APPROXIMATE: Final = "approximate"
EMBEDDING_MODES: Final = [EMBEDDING_EXACT, EMBEDDING_APPROXIMATE]

# Parameters of the reference experiments.
DEFAULT_SIGMA: Final = 1.0
DEFAULT_KAPPA: Final = 0.1
DEFAULT_NU: Final = 1.0
DEFAULT_BANDS: Final = 5000
DEFAULT_BETA: Final = 0.5
DEFAULT_HEIGHT: Final = 150
DEFAULT_WIDTH: Final = 150
DEFAULT_SEED: Final = 0

EPS_CLAMP: Final = 1e-8
EPS_IMAG: Final = 1e-9
DEFAULT_MAX_NEGATIVE_MASS: Final = 0.05

CHOLESKY_MAX_SITES: Final = 4096

DEFAULT_MAX_ITERS: Final = 1000
CONVERGENCE_WINDOW: Final = 10
CONVERGENCE_THRESHOLD: Final = 0.05

DEFAULT_PAIR_BUDGET: Final = 100_000
DEFAULT_REPLICATES: Final = 50
DECILE_LOW: Final = 10
DECILE_HIGH: Final = 90

# Spectral bands evaluated per chunk; bounds the (sites x bands) work array.
SPECTRAL_CHUNK: Final = 256

# Stream identifiers mixed into seeds so that unrelated draws never share a
# random stream.
STREAM_COMPONENT: Final = 1
STREAM_GIBBS_INIT: Final = 2
STREAM_GIBBS_SWEEP: Final = 3
STREAM_PI_LABELS: Final = 4
STREAM_REPLICATE: Final = 5
STREAM_PAIRS: Final = 6

ENV_THREADS: Final = "DGUM_THREADS"
ENV_LOG_LEVEL: Final = "DGUM_LOG_LEVEL"
DEFAULT_LOG_LEVEL: Final = "INFO"

CONF_PRESET: Final = "preset"
CONF_CONFIG: Final = "config"
CONF_METHOD: Final = "method"
CONF_K: Final = "K"
CONF_C: Final = "c"
CONF_BETA: Final = "beta"
CONF_SIGMA: Final = "sigma"
CONF_KAPPA: Final = "kappa"
CONF_NU: Final = "nu"
CONF_BANDS: Final = "bands"
CONF_HEIGHT: Final = "height"
CONF_WIDTH: Final = "width"
CONF_SEED: Final = "seed"
CONF_REPLICATES: Final = "replicates"
CONF_OUT: Final = "out"
CONF_MEANS: Final = "means"
CONF_SIGMAS: Final = "sigmas"
CONF_KAPPAS: Final = "kappas"
CONF_NUS: Final = "nus"
CONF_CLASSES: Final = "classes"
CONF_NEIGHBORHOOD: Final = "neighborhood"
CONF_EMBEDDING: Final = "embedding"
CONF_MAX_ITERS: Final = "max_iters"
CONF_REPULSIVE: Final = "repulsive"

CONF_SIZES: Final = "sizes"
CONF_METHODS: Final = "methods"
CONF_REPS: Final = "reps"
CONF_COLD: Final = "cold"
CONF_D_MAX: Final = "d_max"
CONF_BINS: Final = "bins"
CONF_PAIR_BUDGET: Final = "pair_budget"
CONF_C_VALUES: Final = "c_values"
CONF_KAPPA_VALUES: Final = "kappa_values"
CONF_K_VALUES: Final = "K_values"
CONF_MAX_LAG: Final = "max_lag"
CONF_INPUT: Final = "input"
CONF_PROVENANCE: Final = "provenance"
CONF_LOG_LEVEL: Final = "log_level"

DEFAULT_C: Final = 1.0
DEFAULT_K: Final = 2
DEFAULT_D_MAX: Final = 50.0
DEFAULT_MAX_LAG: Final = 30
DEFAULT_BENCH_SIZES: Final = [64, 128, 256]
DEFAULT_BENCH_REPS: Final = 10
DEFAULT_BENCH_METHODS: Final = [METHOD_FOURIER, METHOD_SPECTRAL, METHOD_CHROMATIC]
SAMPLER_METHODS: Final = [*GMRF_METHODS, *GIBBS_METHODS]

PRESETS_FILE: Final = "presets.yaml"
PGM_MAXVAL: Final = 255
FIELD_FILE_MAGIC: Final = "DGUMFIELD"
