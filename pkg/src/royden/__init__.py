"""Nonlinear potential theory on bounded-degree graphs.

Library + CLI for p-harmonic Dirichlet problems, p-capacity along
exhaustions with parabolicity classification, p-extremal length of path
families, harmonic/potential splitting of bounded finite-energy functions,
and probes for massive sets and nonconstant bounded p-harmonic functions.
"""

from .boundary import (
    InnerPotentialResult,
    ProbeResult,
    bhd_probe,
    inner_potential,
    level_set_components,
)
from .calculus import (
    Exponent,
    VertexFunction,
    dirichlet_sum,
    edge_energy,
    gradient_p,
    norm,
    p_laplacian,
    pairing,
)
from .capacity import (
    CapacitySequence,
    Condenser,
    Verdict,
    capacity,
    capacity_at_infinity,
    classify_parabolicity,
)
from .extremal import (
    EdgeWeight,
    PathFamilySpec,
    extremal_length,
    extremal_length_bruteforce,
)
from .families import (
    Direction,
    Exhaustion,
    FamilyBall,
    GraphFamily,
    HalfSpace,
    LineFamily,
    PlaneFamily,
    SpaceFamily,
    Subtree,
    TreeFamily,
    build_exhaustion,
    default_directions,
    family_ball,
    parse_family,
)
from .graphs import (
    Graph,
    VertexSet,
    build_graph,
    graph_from_edge_list,
    graph_from_json,
    graph_to_edge_list,
    graph_to_json,
    load_graph,
    outer_boundary,
)
from .paths import SimplePath, count_simple_paths, enumerate_simple_paths
from .solver import (
    DirichletProblem,
    RoydenSplit,
    SolveReport,
    residual,
    royden_decompose,
    solve_dirichlet,
    solve_p2_oracle,
)

__version__ = "0.1.0"
