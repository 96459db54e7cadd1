"""Minimal bond dimensions for tree tensor networks.

Admissibility of bond tuples, per-tensor minimality certificates from
effective multilinear ranks, and exact reduction to minimal bonds.
"""

from .errors import (
    AxisMismatch,
    CycleDetected,
    Disconnected,
    DuplicateEdge,
    InconsistencyDetected,
    MemoryBudgetExceeded,
    NonFiniteEntries,
    NonPositiveDimension,
    ShapeMismatch,
    TopologyError,
    TTNError,
    UnknownVertex,
)
from .network import (
    MinimalityCertificate,
    RankReport,
    TreeNetwork,
    apply_edge_factors,
    check_minimality,
    contract,
    cross_validate,
    edge_cut_rank,
    effective_multilinear_rank,
    insert_gauge,
    minimality_margin,
    subtree_matrix,
)
from .reduction import ReductionTrace, local_tucker_refactor, minimal_bonds_oracle, reduce_to_minimal
from .sampling import GenericityResult, genericity_experiment, inflate_bond, sample_network
from .tensors import (
    Bond,
    DenseTensor,
    FlatteningSpec,
    Physical,
    flatten,
    mode_multiply,
    multilinear_rank,
    numerical_rank,
    unflatten,
)
from .topology import (
    AdmissibilityVerdict,
    RootedView,
    TreeTopology,
    is_admissible,
    local_bound,
    path_topology,
    root_at,
    star_topology,
    tucker_admissible,
    validate,
)

__version__ = "0.1.0"
