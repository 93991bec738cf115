"""Robust rank-one matrix completion by extreme-value filtering (M-MSR).

Subpackages and modules:

- ``graph``: bipartite observation graphs, r-robustness, F-local corruption.
- ``solver``: the M-MSR iteration for positive rank-one matrices.
- ``rank2``: a heuristic rank-two extension.
- ``adversary``: corruption models used to probe sufficiency and necessity.
- ``crowd``: worker-skill estimation and label aggregation.
- ``recovery``: exact-recovery experiments with PCA/RPCA baselines.
"""

from .errors import CapabilityError, InputError, MMSRError, NumericalError
from .graph import (
    BipartiteGraph,
    CorruptionSet,
    build_graph,
    generate_er_bipartite,
    is_F_local,
    is_r_robust,
    local_corruption_bound,
    robustness_witness,
    theorem1_threshold,
    vertex_connectivity,
)
from .solver import (
    FactorPair,
    GroundTruth,
    ObservedMatrix,
    SolveReport,
    init_row_completion,
    mmsr_sweep,
    reconstruct_error,
    run_mmsr,
    trim_filter,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "CapabilityError",
    "CorruptionSet",
    "FactorPair",
    "GroundTruth",
    "InputError",
    "MMSRError",
    "NumericalError",
    "ObservedMatrix",
    "SolveReport",
    "build_graph",
    "generate_er_bipartite",
    "init_row_completion",
    "is_F_local",
    "is_r_robust",
    "local_corruption_bound",
    "mmsr_sweep",
    "reconstruct_error",
    "robustness_witness",
    "run_mmsr",
    "theorem1_threshold",
    "trim_filter",
    "vertex_connectivity",
]
