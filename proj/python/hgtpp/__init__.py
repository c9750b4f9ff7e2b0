"""Temporal point process models for forecasting hyperedges."""

from ._core import (
    Dataset,
    ParseError,
    SpecError,
    UnknownModelError,
    clique_decompose,
    fit_and_evaluate,
    generate_synthetic,
    load_dataset,
    model_names,
    rayleigh_expected_duration,
    run_cli,
    scale_times,
    survival_constant,
    survival_rayleigh,
    write_bipartite_corpus,
    write_simplex_corpus,
)

__all__ = [
    "Dataset",
    "ParseError",
    "SpecError",
    "UnknownModelError",
    "clique_decompose",
    "fit_and_evaluate",
    "generate_synthetic",
    "load_dataset",
    "model_names",
    "rayleigh_expected_duration",
    "run_cli",
    "scale_times",
    "survival_constant",
    "survival_rayleigh",
    "write_bipartite_corpus",
    "write_simplex_corpus",
]
