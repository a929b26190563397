"""Prime integer relation hierarchies, their geometric pattern stacks, and the
PTM-guided multi-agent TSP algorithm with its complexity experiments."""

from .complexity import covariance_matrix, problem_complexity, quadratic_trace_system, system_complexity
from .exceptions import (
    ConsistencyError,
    DegenerateInstanceError,
    FormatError,
    InvalidArgumentError,
    InvalidStateError,
    LevelUnreachableError,
    PirlabError,
    RankDeficientError,
)
from .experiment import (
    OptimalityRegressor,
    SweepConfig,
    concavity_report,
    find_v_star,
    optimality_fit,
    predict_complexity,
    sweep_v,
)
from .instances import ProblemInstance, generate_problem, load_instance
from .pattern_geometry import (
    GridSpec,
    PiecewisePoly,
    arc_length,
    build_pattern_stack,
    integrate_once,
    render_svg,
    renormalize,
    renormalized_level1,
    step_function,
)
from .prime_relations import (
    Hierarchy,
    build_hierarchy,
    is_prime_relation,
    power_sum,
    ptm_sequence,
    verify_hierarchy,
)
from .swarm import RunConfig, SwarmTSP, route_distribution, run

__version__ = "0.1.0"
