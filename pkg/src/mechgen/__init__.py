"""mechgen: generate, test, adapt, and playtest avatar-centric game mechanics."""

from .engine import (
    Session,
    SimState,
    applicable_mechanics,
    execute_tick,
    initial_state,
    verify_trace,
)
from .gen import (
    GenerationResult,
    SearchFrontier,
    adapt,
    condition_vocabulary,
    generate,
    generate_controls,
    next_candidate,
    record_nogood,
)
from .loader import (
    DomainFormatError,
    ValidationReport,
    apply_overlay,
    load_domain,
    load_mechanics,
    parse_domain,
    parse_mechanics,
    serialize_domain,
    validate_domain,
)
from .model import (
    DomainSpec,
    GameInstance,
    GeneratorBounds,
    Mechanic,
    Trace,
    canonicalize_mechanic,
    mechanic_signature,
)
from .planner import (
    PlanResult,
    PlayabilityReport,
    check_playability,
    enumerate_traces,
    plan,
)
from .reqs import (
    check_controls,
    check_hard,
    check_progression,
    compare_scores,
    edit_distance,
    intuitiveness_score,
    score_soft,
)

__version__ = "0.1.0"
