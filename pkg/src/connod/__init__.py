"""Projection-constrained nonlinear opinion dynamics on graphs."""

from .bifurcation import (
    BifurcationDiagram,
    LsReduction,
    critical_attention,
    equilibrium_sweep,
    jacobian_origin,
    ls_coefficients,
    threshold_by_bisection,
    unfolding_roots,
)
from .centrality import (
    CentralityReport,
    PerturbationInputs,
    complete_approx,
    eigenpair_perturbation,
    influence_report,
    pinv_psd,
    regular_approx,
    ring_approx,
    star_exact,
)
from .constraints import (
    BiasField,
    ConstraintSet,
    EffectiveNetwork,
    effective_adjacency,
    effective_bias,
    projection_matrix,
)
from .dynamics import (
    NodParams,
    Trajectory,
    constraint_drift,
    full_reduced_equivalence,
    full_rhs,
    integrate_full,
    integrate_reduced,
    reduced_jacobian,
    reduced_rhs,
    register_sigmoid,
)
from .errors import (
    DegenerateThresholdError,
    DivergenceError,
    NumericError,
    UnsupportedRankError,
    ValidationError,
)
from .graphs import (
    Eigenpair,
    Graph,
    build_graph,
    circulant_regular,
    complete,
    custom,
    dominant_eigenpair,
    is_connected,
    is_structurally_balanced,
    ring,
    star,
)
from .scenario import Scenario

__version__ = "0.1.0"
