"""Classical PageRank and the phase-generalized (APR) Szegedy quantum PageRank."""

__version__ = "0.1.0"

from .analysis import (
    Algorithm,
    GeneratorConfig,
    PowerLawFit,
    StabilityReport,
    alpha_sweep,
    default_algorithms,
    degenerate_tail,
    ensemble_run,
    fidelity,
    fidelity_heatmap,
    powerlaw_fit,
    rank_nodes,
)
from .classical import PageRankVector, classical_pagerank, residual_node_set
from .fixtures import fixture_path, load_fixture
from .google import GoogleMatrix, connectivity_matrix, google_from_graph, google_matrix, patch_dangling
from .graph import (
    DirectedGraph,
    ErdosRenyiParams,
    ScaleFreeParams,
    generate_erdos_renyi,
    generate_scale_free,
    in_degree,
    load_edge_list,
    out_degree,
    save_edge_list,
)
from .qrank import APRScheme, QuantumPageRankResult, SchemeKind, run_quantum_pagerank, scheme_phase_map
from .szegedy import PhasePair, SpectralDecomposition, decompose, dense_walk_oracle, evolve
