"""Point symmetries of planar autonomous ODE systems.

Verify infinitesimal symmetry conditions in the time domain and the phase
plane, push time-domain generators down to the phase plane, lift phase-plane
generators back by integrating the lifting condition along characteristics,
and apply one-parameter flows to computed trajectories.
"""

from .expr import (
    DomainError,
    Expr,
    ParseError,
    UnboundVariableError,
    UndeclaredVariableError,
    compile_scalar,
    compile_vector,
    diff,
    eval,
    parse,
    simplify,
    substitute,
    to_string,
    variables_of,
)
from .flow import (
    TransformedCurve,
    Trajectory,
    exp_map_phase,
    exp_map_time,
    integrate_system,
    resample_uniform,
    solution_preservation_check,
)
from .jets import (
    ChartMismatchError,
    JetPointPhase,
    JetPointTime,
    PhaseGenerator,
    System2D,
    TimeGenerator,
    phase_rhs,
    prolong_phase,
    prolong_time,
)
from .lifting import (
    LiftResult,
    LiftSpec,
    assemble_lift,
    check_lift_consistency,
    is_constant_of_motion,
    lift_characteristic,
    lift_rhs,
    verify_lift,
)
from .modelfile import ModelFileError, load_model, loads_model, resolve_model
from .models import (
    MODEL_NAMES,
    ModelLift,
    NamedModel,
    builtin_models,
    from_polar,
    get_model,
    lift_xi,
    to_polar,
    unwrap_series,
)
from .reduction import (
    DEFAULT_JET_SEED,
    pushforward,
    sample_jets,
    verify_commutation,
)
from .verify import (
    RegionError,
    ResidualReport,
    SampleRegion,
    is_symmetry_phase,
    is_symmetry_time,
    residual_phase,
    residual_phase_swapped,
    residual_time,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_JET_SEED",
    "MODEL_NAMES",
    "ChartMismatchError",
    "DomainError",
    "Expr",
    "JetPointPhase",
    "JetPointTime",
    "LiftResult",
    "LiftSpec",
    "ModelFileError",
    "ModelLift",
    "NamedModel",
    "ParseError",
    "PhaseGenerator",
    "RegionError",
    "ResidualReport",
    "SampleRegion",
    "System2D",
    "TimeGenerator",
    "Trajectory",
    "TransformedCurve",
    "UnboundVariableError",
    "UndeclaredVariableError",
    "assemble_lift",
    "builtin_models",
    "check_lift_consistency",
    "compile_scalar",
    "compile_vector",
    "diff",
    "eval",
    "exp_map_phase",
    "exp_map_time",
    "from_polar",
    "get_model",
    "integrate_system",
    "is_constant_of_motion",
    "is_symmetry_phase",
    "is_symmetry_time",
    "lift_characteristic",
    "lift_rhs",
    "lift_xi",
    "load_model",
    "loads_model",
    "parse",
    "phase_rhs",
    "prolong_phase",
    "prolong_time",
    "pushforward",
    "resample_uniform",
    "residual_phase",
    "residual_phase_swapped",
    "residual_time",
    "resolve_model",
    "sample_jets",
    "simplify",
    "solution_preservation_check",
    "substitute",
    "to_string",
    "unwrap_series",
    "variables_of",
    "verify_commutation",
    "verify_lift",
    "__version__",
]
