"""Greedy placement of circuits over multiple array resources.

Circuits are abstract 2-D shapes (layer count x per-layer gate width).
Placement runs in three phases: seed the shortest circuits one per array
at t=0, insert the rest at the cheapest (array, earliest feasible start),
then re-sort each array by (recorded feasible start, length) and rebuild
its timeline in that order.  Width capacity is respected at every
timestep; geometry is not consulted here (that is the compiler's job).
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .circuits import LayeredCircuit


class UnplaceableCircuitError(ValueError):
    """A circuit is wider than the array capacity at some layer."""

    def __init__(self, name: str, width: int, capacity: int):
        self.circuit_name = name
        super().__init__(
            f"circuit {name!r} has max layer width {width} > capacity {capacity}"
        )


@dataclass(frozen=True)
class PlacementRequest:
    circuits: tuple[LayeredCircuit, ...]
    num_arrays: int
    capacity: int

    def __post_init__(self):
        if self.num_arrays < 1:
            raise ValueError("num_arrays must be >= 1")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")


@dataclass(frozen=True)
class Assignment:
    """One circuit on one array; ``start`` is the feasible start recorded
    at assignment time, which is also the tiebreak key for refinement."""

    circuit_index: int
    start: int
    length: int


@dataclass
class ArrayTimeline:
    """Occupied width per timestep plus the ordered assignment log."""

    occupancy: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    assigned: list[Assignment] = field(default_factory=list)

    def add(self, assignment: Assignment, lc: LayeredCircuit) -> None:
        for k, width in enumerate(lc.width_profile):
            self.occupancy[assignment.start + k] += width
        self.assigned.append(assignment)

    def span(self) -> int:
        return max((t + 1 for t, w in self.occupancy.items() if w), default=0)


@dataclass(frozen=True)
class Placement:
    """Final mapping: per-circuit (array, start) and per-array execution order."""

    request: PlacementRequest
    assignments: tuple[tuple[int, int], ...]  # circuit index -> (array, start)
    array_orders: tuple[tuple[int, ...], ...]  # array index -> circuit indices

    def circuits_on(self, array: int) -> list[LayeredCircuit]:
        return [self.request.circuits[i] for i in self.array_orders[array]]

    def to_json(self) -> str:
        arrays = []
        for a, order in enumerate(self.array_orders):
            arrays.append({
                "index": a,
                "circuits": [
                    {
                        "name": self.request.circuits[i].name,
                        "start": self.assignments[i][1],
                        "length": self.request.circuits[i].length,
                    }
                    for i in order
                ],
            })
        return json.dumps({"arrays": arrays})


def _check_fits(lc: LayeredCircuit, capacity: int) -> None:
    if lc.max_width > capacity:
        raise UnplaceableCircuitError(lc.name, lc.max_width, capacity)


def _ascending_by_length(req: PlacementRequest) -> list[int]:
    # Ties broken by input position, for determinism.
    return sorted(range(len(req.circuits)), key=lambda i: (req.circuits[i].length, i))


def initial_allocation(
    req: PlacementRequest,
) -> tuple[list[ArrayTimeline], list[int]]:
    """Phase 1: seed the N shortest circuits, one per array, at t=0.

    Returns the per-array timelines and the remaining circuit indices,
    still sorted ascending by length.
    """
    order = _ascending_by_length(req)
    timelines = [ArrayTimeline() for _ in range(req.num_arrays)]
    for array, idx in enumerate(order[: req.num_arrays]):
        lc = req.circuits[idx]
        _check_fits(lc, req.capacity)
        timelines[array].add(Assignment(idx, 0, lc.length), lc)
    return timelines, order[req.num_arrays:]


def earliest_feasible_start(tl: ArrayTimeline, lc: LayeredCircuit, capacity: int) -> int:
    """Smallest t such that every layer fits under the width capacity."""
    _check_fits(lc, capacity)
    horizon = tl.span()
    t = 0
    while t <= horizon:  # past the horizon the timeline is empty
        if all(
            tl.occupancy.get(t + k, 0) + w <= capacity
            for k, w in enumerate(lc.width_profile)
        ):
            return t
        t += 1
    return t


def placement_cost(start: int, lc: LayeredCircuit) -> int:
    """Completion time of the circuit if inserted at ``start``."""
    return start + lc.length


def incremental_place(
    timelines: list[ArrayTimeline],
    remaining: list[int],
    req: PlacementRequest,
) -> list[ArrayTimeline]:
    """Phase 2: insert each remaining circuit on the cheapest array.

    Cost is (earliest feasible start + length); ties go to the lowest
    array index.  Timelines are updated after every insertion.
    """
    for idx in remaining:
        lc = req.circuits[idx]
        _check_fits(lc, req.capacity)
        best: tuple[int, int, int] | None = None  # (cost, array, start)
        for a, tl in enumerate(timelines):
            start = earliest_feasible_start(tl, lc, req.capacity)
            cost = placement_cost(start, lc)
            if best is None or (cost, a) < (best[0], best[1]):
                best = (cost, a, start)
        assert best is not None
        timelines[best[1]].add(Assignment(idx, best[2], lc.length), lc)
    return timelines


def refine_intra_array(
    tl: ArrayTimeline, req: PlacementRequest
) -> tuple[list[Assignment], ArrayTimeline]:
    """Phase 3 for one array: re-sort by (recorded start, length) and
    rebuild the timeline greedily in the refined order.

    Returns the final assignments (with rebuilt start times) in execution
    order, plus the rebuilt timeline.
    """
    order = sorted(tl.assigned, key=lambda a: (a.start, a.length))
    rebuilt = ArrayTimeline()
    final: list[Assignment] = []
    for a in order:
        lc = req.circuits[a.circuit_index]
        start = earliest_feasible_start(rebuilt, lc, req.capacity)
        placed = Assignment(a.circuit_index, start, a.length)
        rebuilt.add(placed, lc)
        final.append(placed)
    return final, rebuilt


def schedule_all(req: PlacementRequest) -> Placement:
    """Run all three phases and return the final placement.

    Deterministic for a fixed request; raises ``UnplaceableCircuitError``
    if any circuit is wider than the capacity.
    """
    timelines, remaining = initial_allocation(req)
    incremental_place(timelines, remaining, req)

    assignments: dict[int, tuple[int, int]] = {}
    orders: list[tuple[int, ...]] = []
    for array, tl in enumerate(timelines):
        final, _ = refine_intra_array(tl, req)
        orders.append(tuple(a.circuit_index for a in final))
        for a in final:
            assignments[a.circuit_index] = (array, a.start)
    return Placement(
        request=req,
        assignments=tuple(assignments[i] for i in range(len(req.circuits))),
        array_orders=tuple(orders),
    )
