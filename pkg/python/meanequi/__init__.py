"""meanequi is a numerical laboratory for mean equicontinuity."""

from __future__ import annotations

from meanequi._catalog import CatalogEntry
from meanequi._catalog import CatalogOptions
from meanequi._catalog import Flags
from meanequi._catalog import build_catalog
from meanequi._catalog import find_entry
from meanequi._catalog import sample_pair_near_diagonal
from meanequi._catalog import sample_points
from meanequi._checkers import CheckConfig
from meanequi._checkers import CheckStatus
from meanequi._checkers import ConsistencyReport
from meanequi._checkers import ModulusCell
from meanequi._checkers import ModulusScan
from meanequi._checkers import Refutation
from meanequi._checkers import ScanCache
from meanequi._checkers import SystemVerdict
from meanequi._checkers import averaged_function_convergence
from meanequi._checkers import averaged_function_equicontinuity
from meanequi._checkers import check_mean_l_stability
from meanequi._checkers import check_product_closure
from meanequi._checkers import check_property
from meanequi._checkers import check_relation_collapse
from meanequi._checkers import check_theorem_3_6
from meanequi._checkers import check_theorem_3_8
from meanequi._checkers import check_theorem_5_1
from meanequi._checkers import check_theorem_5_3
from meanequi._checkers import check_weakly_mixing_fixed_point
from meanequi._checkers import scan_moduli
from meanequi._checkers import scan_modulus
from meanequi._config import ExperimentConfig
from meanequi._config import load_config
from meanequi._config import parse_config
from meanequi._densities import DensityEstimate
from meanequi._densities import IndexTrace
from meanequi._densities import banach_density_estimate
from meanequi._densities import density_estimate
from meanequi._densities import estimate_densities
from meanequi._densities import window_fraction
from meanequi._ergodic import BirkhoffSeries
from meanequi._ergodic import UEOutcome
from meanequi._ergodic import UniqueErgodicityReport
from meanequi._ergodic import WindowIndependenceReport
from meanequi._ergodic import birkhoff
from meanequi._ergodic import orbit_sample
from meanequi._ergodic import unique_ergodicity_check
from meanequi._ergodic import window_average_independence
from meanequi._metrics import MeanMetricEstimate
from meanequi._metrics import MetricKind
from meanequi._metrics import besicovitch_estimate
from meanequi._metrics import dbar_n
from meanequi._metrics import sup_dbar
from meanequi._metrics import weyl_estimate
from meanequi._metrics import windowed_uniform_bound
from meanequi._proximality import PairVerdict
from meanequi._proximality import Relation
from meanequi._proximality import banach_proximal_test
from meanequi._proximality import mean_sensitive_pair_test
from meanequi._proximality import proximal_test
from meanequi._proximality import regionally_proximal_test
from meanequi._report import run_experiment
from meanequi._report import validate_report
from meanequi._report import write_report
from meanequi._spaces import FinitePoint
from meanequi._spaces import Observable
from meanequi._spaces import Orbit
from meanequi._spaces import ProductPoint
from meanequi._spaces import ScaledSystem
from meanequi._spaces import SymbolicPoint
from meanequi._spaces import System
from meanequi._spaces import TorusPoint
from meanequi._spaces import hitting_trace
from meanequi._spaces import iterate
from meanequi._spaces import orbit_distance_trace
from meanequi._spaces import point_from_json
from meanequi._types import CapabilityError
from meanequi._types import ConfigError
from meanequi._types import EmptyScheduleError
from meanequi._types import Expectation
from meanequi._types import HorizonError
from meanequi._types import MeanEquiError
from meanequi._types import MixedSpaceError
from meanequi._types import Outcome
from meanequi._types import PairOutcome
from meanequi._types import PreconditionError
from meanequi._types import Property
from meanequi._types import ResolutionError
from meanequi._types import SeriesError

__all__ = [  # noqa: RUF022
    # Points and systems
    "FinitePoint",
    "Observable",
    "Orbit",
    "ProductPoint",
    "ScaledSystem",
    "SymbolicPoint",
    "System",
    "TorusPoint",
    "hitting_trace",
    "iterate",
    "orbit_distance_trace",
    "point_from_json",
    # Densities
    "DensityEstimate",
    "IndexTrace",
    "banach_density_estimate",
    "density_estimate",
    "estimate_densities",
    "window_fraction",
    # Mean metrics
    "MeanMetricEstimate",
    "MetricKind",
    "besicovitch_estimate",
    "dbar_n",
    "sup_dbar",
    "weyl_estimate",
    "windowed_uniform_bound",
    # Pair relations
    "PairVerdict",
    "Relation",
    "banach_proximal_test",
    "mean_sensitive_pair_test",
    "proximal_test",
    "regionally_proximal_test",
    # Checkers
    "CheckConfig",
    "CheckStatus",
    "ConsistencyReport",
    "ModulusCell",
    "ModulusScan",
    "Refutation",
    "ScanCache",
    "SystemVerdict",
    "averaged_function_convergence",
    "averaged_function_equicontinuity",
    "check_mean_l_stability",
    "check_product_closure",
    "check_property",
    "check_relation_collapse",
    "check_theorem_3_6",
    "check_theorem_3_8",
    "check_theorem_5_1",
    "check_theorem_5_3",
    "check_weakly_mixing_fixed_point",
    "scan_moduli",
    "scan_modulus",
    # Ergodic averages
    "BirkhoffSeries",
    "UEOutcome",
    "UniqueErgodicityReport",
    "WindowIndependenceReport",
    "birkhoff",
    "orbit_sample",
    "unique_ergodicity_check",
    "window_average_independence",
    # Catalog
    "CatalogEntry",
    "CatalogOptions",
    "Flags",
    "build_catalog",
    "find_entry",
    "sample_pair_near_diagonal",
    "sample_points",
    # Experiments
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "run_experiment",
    "validate_report",
    "write_report",
    # Enums and errors
    "Expectation",
    "Outcome",
    "PairOutcome",
    "Property",
    "CapabilityError",
    "ConfigError",
    "EmptyScheduleError",
    "HorizonError",
    "MeanEquiError",
    "MixedSpaceError",
    "PreconditionError",
    "ResolutionError",
    "SeriesError",
]
