"""Counter reachability games under Z, VASS and non-blocking VASS semantics."""

from .core import (
    AxisZero,
    Configuration,
    ContractError,
    CounterSystem,
    Diagnostic,
    Edge,
    GameInstance,
    Location,
    LocationsAtZero,
    Player,
    Semantics,
    SingleConfig,
    apply_edge,
    enabled_edges,
    is_short_range,
    make_system,
    validate,
    validate_instance,
)
from .oracle import (
    BoundaryPolicy,
    Play,
    PlayStatus,
    PositionalStrategy,
    RegionResult,
    Verdict,
    Window,
    certain_region,
    check_downward_closure,
    extract_strategy,
    simulate,
    solve_bounded,
)

__version__ = "0.1.0"
