"""Adaptation baselines: serial per-circuit compilation and whole-workload
merging, for comparison against multi-program compilation."""

from __future__ import annotations

from dataclasses import dataclass

from .arraystate import GridSpec
from .circuits import Circuit, merge_circuits
from .compiler import CompiledSchedule, CompileTimeoutError, solve_window


class BaselineTimeoutError(Exception):
    """A baseline compile ran out of budget; carries partial totals."""

    def __init__(self, failed_circuit: str, total_stages: int, total_seconds: float,
                 completed: list[str]):
        self.failed_circuit = failed_circuit
        self.total_stages = total_stages
        self.total_seconds = total_seconds
        self.completed = completed
        super().__init__(
            f"baseline compile of {failed_circuit!r} timed out after "
            f"{len(completed)} completed circuits"
        )


@dataclass
class SequentialResult:
    schedules: list[CompiledSchedule]
    total_stages: int
    total_seconds: float


def compile_sequential(
    circuits: list[Circuit],
    grid: GridSpec,
    budget: float | None = None,
    **compile_kwargs,
) -> SequentialResult:
    """Compile each circuit alone on an empty array and sum the costs.

    The cumulative stage count is the serial execution cost: circuits run
    one after another, so stages add up.  ``budget`` applies per circuit.
    """
    schedules: list[CompiledSchedule] = []
    total_stages = 0
    total_seconds = 0.0
    for circuit in circuits:
        try:
            sched = solve_window(circuit, grid, None, budget, **compile_kwargs)
        except CompileTimeoutError as exc:
            raise BaselineTimeoutError(
                circuit.name, total_stages, total_seconds,
                [s.circuit.name for s in schedules],
            ) from exc
        schedules.append(sched)
        total_stages += sched.num_stages
        total_seconds += sched.solve_seconds
    return SequentialResult(schedules, total_stages, total_seconds)


def compile_merged(
    circuits: list[Circuit],
    grid: GridSpec,
    budget: float | None = None,
    **compile_kwargs,
) -> tuple[CompiledSchedule, int, float]:
    """Merge the workload into one circuit on disjoint qubits and compile it.

    Returns (schedule, stage count, solve seconds).
    """
    merged = merge_circuits(circuits)
    try:
        sched = solve_window(merged, grid, None, budget, **compile_kwargs)
    except CompileTimeoutError as exc:
        raise BaselineTimeoutError(merged.name, 0, 0.0, []) from exc
    return sched, sched.num_stages, sched.solve_seconds


def delta_stage_accounting(
    joint_stages_after: list[int],
    seconds: list[float],
) -> list[tuple[int, float]]:
    """Per-circuit contribution of a recorded multi-program run.

    ``joint_stages_after[m]`` is the array's joint stage count right after
    circuit ``m`` was committed; the per-circuit stage delta is the
    difference against the previous value, and the time delta is just that
    circuit's solve time.
    """
    if len(joint_stages_after) != len(seconds):
        raise ValueError("stage and time records must align")
    out = []
    previous = 0
    for stages, secs in zip(joint_stages_after, seconds):
        out.append((stages - previous, secs))
        previous = stages
    return out
