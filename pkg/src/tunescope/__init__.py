"""Exploration, filtering, and optimization of categorical parameter
spaces against one numeric target."""

from .dataset import (
    Dataset,
    DatasetError,
    ParameterSchema,
    build_index,
    dataset_from_codes,
    load_csv,
)
from .filtering import (
    AggregateSummary,
    FilterState,
    RDSummary,
    aggregate_summary,
    explorer_summaries,
    selection_mask,
)
from .importance import (
    ImportanceReport,
    RecoveryPoint,
    incremental_pipeline,
    rank_parameters,
    recovery_experiment,
)
from .provenance import ProvenanceEntry, ProvenanceLog, delta_label
from .sampling import (
    SamplePlan,
    SampleReason,
    choose_sample_size,
    draw_sample,
    sample_diagnostics,
)
from .search import (
    ConfigTable,
    DatasetEvaluator,
    SearchStep,
    SearchTrace,
    exhaustive_best,
    random_search,
    simulated_annealing,
)
from .stats import (
    DensityCurve,
    KSResult,
    StatSummary,
    kde_density,
    ks_two_sample,
    summarize,
)
from .synthetic import GroundTruth, SyntheticSpec, generate_synthetic, parse_spec_text

__version__ = "0.1.0"

__all__ = [
    "AggregateSummary",
    "ConfigTable",
    "Dataset",
    "DatasetError",
    "DatasetEvaluator",
    "DensityCurve",
    "FilterState",
    "GroundTruth",
    "ImportanceReport",
    "KSResult",
    "ParameterSchema",
    "ProvenanceEntry",
    "ProvenanceLog",
    "RDSummary",
    "RecoveryPoint",
    "SamplePlan",
    "SampleReason",
    "SearchStep",
    "SearchTrace",
    "StatSummary",
    "SyntheticSpec",
    "aggregate_summary",
    "build_index",
    "choose_sample_size",
    "dataset_from_codes",
    "delta_label",
    "draw_sample",
    "exhaustive_best",
    "explorer_summaries",
    "generate_synthetic",
    "incremental_pipeline",
    "kde_density",
    "ks_two_sample",
    "load_csv",
    "parse_spec_text",
    "random_search",
    "rank_parameters",
    "recovery_experiment",
    "sample_diagnostics",
    "selection_mask",
    "simulated_annealing",
    "summarize",
]
