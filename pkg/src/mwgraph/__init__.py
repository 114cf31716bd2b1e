"""mwgraph: spectral analysis and expander search for matrix-weighted graphs.

A matrix-weighted graph assigns a k x k positive semidefinite matrix to each
edge of an undirected graph.  This package builds the blockwise adjacency
and Laplacian operators, realizes the Laplacian as a cellular-sheaf Gram
matrix, verifies expander-mixing and Cheeger-type inequalities, and
constructs and searches projection-weighted expanders from tight fusion
frames.
"""

from .errors import (
    DegenerateEdgeError,
    DimMismatchError,
    DomainError,
    EmptyOrFullSubsetError,
    IndexOutOfRangeError,
    MwgError,
    NonFiniteError,
    NotColorableError,
    NotProjectionError,
    NotProjectionWeightsError,
    NotProperlyColoredError,
    NotPsdError,
    NotScalarRegularError,
    NotSymmetricError,
    NotTightError,
    ParseError,
    SingularVolumeError,
    TooLargeError,
)
from .expansion import (
    CheegerReport,
    CounterexampleCertificate,
    EmlReport,
    cheeger_constants,
    cheeger_ratios,
    check_cheeger_lower_bounds,
    edge_count,
    eml_irregular,
    eml_irregular_exhaustive,
    eml_regular,
    eml_regular_exhaustive,
    verify_counterexample,
)
from .frames import (
    EdgeColoring,
    ExpanderReport,
    FrameExistence,
    FusionFrame,
    SearchResult,
    alon_boppana_compare,
    augment_with_identity,
    build_expander,
    equiangular_frame_2d,
    eta,
    frame_existence,
    load_frame,
    named_frame,
    proper_edge_coloring,
    ratio_inequality_holds,
    sample_expanders,
    search_expanders,
    verify_tight,
)
from .graphgen import canonical_code, enumerate_regular_graphs, graph6_like
from .graphs import (
    BaseGraph,
    MatrixWeightedGraph,
    Regularity,
    ScalarWeightedGraph,
    connected_components,
    degree,
    lift_identity,
    load,
    regularity,
    save,
    scalarize_trace,
    total_volume,
    volume,
)
from .linalg import (
    DEFAULT_TOL,
    Spectrum,
    Tolerances,
    eigh,
    is_psd,
    kernel_dim,
    loewner_leq,
    pseudo_sqrt_inv,
)
from .operators import (
    BoundReport,
    OperatorBundle,
    adjacency_spectrum,
    assemble,
    check_adjacency_trace_bounds,
    check_laplacian_trace_bounds,
    check_normalized_bound,
    laplacian_spectrum,
)
from .sheaf import (
    Coboundary,
    Truss,
    build_coboundary,
    global_sections,
    load_truss,
    rigid_motions,
    truss_to_mwg,
    verify_factorization,
)

__version__ = "0.1.0"
