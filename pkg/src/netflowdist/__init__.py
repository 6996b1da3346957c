"""Network flow distance between graphs, baseline distances, and graph clustering."""

from .clustering import (
    ClusterAssignment,
    SimilarityMatrix,
    adjusted_rand_index,
    kmeans,
    replace_diagonal_with_average,
    similarity_matrix,
    spectral_cluster,
)
from .distance import (
    DistanceMatrix,
    DistanceResult,
    TimeGrid,
    gdd_distance,
    kernel_difference,
    make_time_grid,
    nld_distance,
    nld_distance_oracle,
    off_diagonal_abs_sum,
    pairwise_distance_matrix,
)
from .errors import (
    DegenerateInputError,
    DimensionError,
    InputError,
    NetflowError,
    NumericError,
    ParseError,
    ScenarioError,
    StateError,
)
from .generators import (
    SbmParams,
    ScenarioBundle,
    add_bridges_variant,
    bridge_deletion_scenario,
    fixed_bridge_scenario,
    sample_sbm,
    two_sbm_scenario,
)
from .graph import (
    Graph,
    add_edge,
    frobenius_laplacian_distance,
    from_edge_list,
    hamming_distance,
    is_connected,
    laplacian,
    remove_edge,
)
from .spectral import Spectrum, eigendecompose, heat_kernel, heat_kernel_series_oracle

__version__ = "0.1.0"
