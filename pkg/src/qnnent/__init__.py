"""Entanglement of quasi-product and neural-network quantum states on lattices."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DegenerateStateError,
    InputError,
    PreconditionError,
    QnnentError,
    ResourceError,
)
from .geometry import LatticeGeometry, epsilon_ball, validate_k_local
from .state import (
    Alphabet,
    Bipartition,
    DenseState,
    SpinConfiguration,
    expectation,
    normalize,
    numerical_rank,
    read_qns,
    renyi_entropy,
    schmidt,
    write_qns,
)
from .quasi_product import (
    ClusterCover,
    LocalCluster,
    build_cluster_state_1d,
    build_graph_state,
    build_toric_ground,
    qp_amplitude,
    rank_bound,
    toric_quasi_product_state,
    verify_stabilizers,
)
from .networks import (
    DbmSpec,
    FeedForwardSpec,
    Locality,
    RbmSpec,
    dbm_amplitude,
    dbm_six_groups,
    ffnn_amplitude,
    random_network,
    rbm_amplitude,
    rbm_to_quasi_product,
)
from .entanglement import area_law_check, entropy_sweep, make_regions, topological_entropy
from .images import TargetSet, TorusImage, boundary_map, enumerate_cycles, is_cycle, target_state

__all__ = [name for name in dir() if not name.startswith("_")]
