"""Active deanonymization of bipartite membership networks."""

from ._deanon import (
    BinaryChannel,
    BipartiteGraph,
    GenerationParams,
    binary_kl,
    bound_for_config,
    bsc,
    compose,
    constant,
    generate,
    i_max,
    identity,
    ingest,
    mixture,
    mutual_information,
    omission,
    posterior,
    results_csv,
    run_experiment,
    scan,
    theorem1_bound,
)

__all__ = [
    "BinaryChannel",
    "BipartiteGraph",
    "GenerationParams",
    "binary_kl",
    "bound_for_config",
    "bsc",
    "compose",
    "constant",
    "generate",
    "i_max",
    "identity",
    "ingest",
    "mixture",
    "mutual_information",
    "omission",
    "posterior",
    "results_csv",
    "run_experiment",
    "scan",
    "theorem1_bound",
]
