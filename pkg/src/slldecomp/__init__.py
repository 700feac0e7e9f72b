"""Linkage learning on concatenated unitation functions: FIHC populations,
DSM statistics, population-size estimates and undecidability theory."""

from .errors import (DimensionError, InsufficientSampleError, ParameterError, PlateauError,
                     ProfileError, UndecidableError)
from .fihc import RngSeed, extend_population, fihc_optimize, sample_optimized_population
from .functions import (ConcatenatedProblem, MonotonicityProfile, SymmetricUnitationFunction,
                        UnitationFunction, builtin, evaluate, extract_profile, resolve_function, unitation)
from .harness import ExperimentConfig, ExperimentRecord, percentile, run_growth_experiment
from .linkage import build_linkage_tree, optimal_mixing, run_lt_gomea_lite
from .stats import build_dsm, distance, fill, fill_summary, is_perfect_decomposition
from .theory import (is_sll_undecidable, q_tilde_bimodal, q_tilde_reverted, s_min,
                     scan_undecidable, theoretical_distribution)

__version__ = "0.1.0"
