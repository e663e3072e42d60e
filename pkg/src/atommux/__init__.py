"""Multi-programming compiler toolkit for reconfigurable neutral-atom arrays.

Places multiple circuits across simulated array resources, compiles them
concurrently under order-preserving trap-movement and gate-exclusivity
constraints, validates the results against an independent oracle, and
benchmarks against serial and merged baselines.
"""

from .arraystate import (
    ArrayOccupancy,
    CommitError,
    Cycle,
    DecompositionError,
    ExecutionSequence,
    GateEvent,
    GridSpec,
    Movement,
    col_rule_ok,
    compute_zones,
    decompose_to_cycles,
    row_rule_ok,
)
from .baselines import (
    BaselineTimeoutError,
    SequentialResult,
    compile_merged,
    compile_sequential,
    delta_stage_accounting,
)
from .circuits import (
    Circuit,
    CircuitError,
    Gate,
    LayeredCircuit,
    ParseError,
    layer_dag,
    merge_circuits,
    parse_circuit,
    shape,
)
from .compiler import (
    CompiledSchedule,
    CompileOutcome,
    CompileTimeoutError,
    EncodedProblem,
    ExtractionError,
    GridTooSmallError,
    MultiProgramError,
    StageState,
    VariableSet,
    compile_each,
    compile_on_array,
    encode_base,
    encode_multiprogram,
    extract_schedule,
    solve_window,
)
from .metrics import MetricRow, UndefinedMetricError, rpr, speedup, time_ratio
from .placement import (
    ArrayTimeline,
    Placement,
    PlacementRequest,
    UnplaceableCircuitError,
    earliest_feasible_start,
    incremental_place,
    initial_allocation,
    placement_cost,
    refine_intra_array,
    schedule_all,
)
from .solver import (
    BacktrackingBackend,
    Deadline,
    ExhaustiveBackend,
    SolveBudgetExceeded,
)
from .validator import (
    ALL_KINDS,
    Violation,
    ViolationReport,
    stage_count,
    validate_joint,
    validate_single,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
