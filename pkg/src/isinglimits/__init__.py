"""Exact small-scale tools for the sample complexity of Ising graph selection."""

from .bounds import (
    ThresholdReport,
    ensemble_a_threshold,
    fano_pairwise,
    fano_trivial_entropy,
    necessary_threshold,
    sufficient_threshold,
    threshold_report,
)
from .decoders import DecodeResult, FeasibleSet, mean_decode, ml_decode, projection_distance
from .divergences import j_divergence, j_from_log_partition, kl, kl_from_means, sym_kl, sym_kl_from_means
from .ensembles import Ensemble, ensemble_a, ensemble_b_degree, ensemble_b_edge, ensemble_c
from .errors import IsingLimitsError, ScaleError
from .graphs import Graph, GraphClassSpec, enumerate_class, matching_number
from .harness import ExperimentConfig, SweepResult, emit, run_sweep, run_trial
from .ising import IsingParams, MeanParams, SampleSet, log_partition, mean_params_exact, sample_exact
from .verify import verify_lemma

__version__ = "0.1.0"

__all__ = [
    "DecodeResult",
    "emit",
    "Ensemble",
    "ensemble_a",
    "ensemble_a_threshold",
    "ensemble_b_degree",
    "ensemble_b_edge",
    "ensemble_c",
    "enumerate_class",
    "ExperimentConfig",
    "fano_pairwise",
    "fano_trivial_entropy",
    "FeasibleSet",
    "Graph",
    "GraphClassSpec",
    "IsingLimitsError",
    "IsingParams",
    "j_divergence",
    "j_from_log_partition",
    "kl",
    "kl_from_means",
    "log_partition",
    "matching_number",
    "mean_decode",
    "mean_params_exact",
    "MeanParams",
    "ml_decode",
    "necessary_threshold",
    "projection_distance",
    "run_sweep",
    "run_trial",
    "sample_exact",
    "SampleSet",
    "ScaleError",
    "sufficient_threshold",
    "SweepResult",
    "sym_kl",
    "sym_kl_from_means",
    "threshold_report",
    "ThresholdReport",
    "verify_lemma",
]
