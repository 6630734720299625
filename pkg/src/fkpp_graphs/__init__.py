"""Ground states and dynamics of u_t = u'' + u(1-u) on compact metric graphs.

Flower graphs (one Dirichlet pendant plus self-loops at a single vertex)
get exact treatment through the phase-plane period functions; arbitrary
graphs are served by the discretized Laplacian and the gradient-flow
integrator.  Start with solve_flower / solve_interval for steady states,
lambda0_flower / lambda0_discretized for the trivial-vs-nontrivial
threshold, and run_to_attractor for time integration.
"""

from .errors import (
    BelowThreshold,
    ComparisonViolated,
    DisconnectedGraph,
    FisherKppError,
    InvalidDomain,
    LinearSolveFailure,
    LoopTooLong,
    MeshTooCoarse,
    NegativeInitialData,
    NewtonStalled,
    NonpositiveLength,
    NoPendant,
    OrbitNotClosed,
    OutsideRegion,
    StepTooLarge,
)
from .graph import (
    Edge,
    FlowerSpec,
    MetricGraph,
    ValidationReport,
    as_flower,
    flower_graph,
    graph_from_dict,
    graph_from_json,
    interval_graph,
    validate,
)
from .phaseplane import PhasePoint, energy, q_tilde, turning_point_p0, \
    turning_point_pair, well
from .period import (
    HOMOCLINIC_OFFSET,
    PeriodGradient,
    PeriodValue,
    arclength_from_turning,
    asymptotic_T,
    center_limits,
    grad_T,
    grad_T0,
    interval_period_slope,
    period_T,
    period_T0,
)
from .mesh import (
    Field,
    GraphMesh,
    constant_field,
    field_from_function,
    field_from_profiles,
    free_energy,
)
from .spectral import (
    Region,
    RegionReport,
    SpectralResult,
    eigenvalue_length_slope,
    lambda0_discretized,
    lambda0_flower,
    lower_boundary,
    lower_boundary_symmetric,
    region_membership,
    secular_mismatch,
)
from .groundstate import (
    GroundStateSolution,
    JacobianReport,
    energy_of,
    jacobian_report,
    proximity_check,
    reconstruct_profile,
    solve_flower,
    solve_interval,
)
from .evolve import (
    EvolutionTrace,
    Terminal,
    comparison_monitor,
    run_to_attractor,
    stable_dt,
    step,
)

__version__ = "0.1.0"
