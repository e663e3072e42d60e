"""Committed execution state of one array: cycle-wise sequences and zones.

A compiled schedule decomposes into cycles; each cycle is a trap-movement
step followed by a gate step.  Cycle 0 records the initial placement of
every atom as a zero-length movement.  For cycles k >= 1 a movement record
is kept for every atom held in a mobile trap at stage k-1 (the departure
stage), including atoms that stay put: a parked mobile line still blocks
other lines from sweeping across it, so it must be visible to later
compiles.  Atoms in static traps produce no movement records and may be
swept over freely.

Movement records of committed circuits carve the array into
order-preserving zones (the coordinate bands a movement touches) and
order-free zones (everything else).  Zone classification is a
visualization/acceleration layer only; correctness is enforced by the
compiler's constraints and by the validator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from .circuits import Circuit


class DecompositionError(ValueError):
    """Schedule cannot be decomposed (e.g. a static-trapped atom moved)."""


class CommitError(ValueError):
    """New sequence conflicts with the occupancy at commit time."""


@dataclass(frozen=True)
class GridSpec:
    """Interaction-site grid plus the number of mobile-trap lines."""

    x_sites: int
    y_sites: int
    aod_rows: int = 0  # 0 means one line per site row/column
    aod_cols: int = 0

    def __post_init__(self):
        if self.x_sites < 1 or self.y_sites < 1:
            raise ValueError("grid needs at least one site per axis")
        if self.aod_rows == 0:
            object.__setattr__(self, "aod_rows", self.y_sites)
        if self.aod_cols == 0:
            object.__setattr__(self, "aod_cols", self.x_sites)
        if self.aod_rows < 1 or self.aod_cols < 1:
            raise ValueError("need at least one AOD row and column")

    @property
    def num_sites(self) -> int:
        return self.x_sites * self.y_sites

    def in_bounds(self, site: tuple[int, int]) -> bool:
        return 0 <= site[0] < self.x_sites and 0 <= site[1] < self.y_sites


@dataclass(frozen=True)
class Movement:
    """One atom's trap-step motion in one cycle (zero-length = parked)."""

    circuit: int
    cycle: int
    index: int
    qubit: int
    start: tuple[int, int]
    end: tuple[int, int]


@dataclass(frozen=True)
class GateEvent:
    circuit: int
    cycle: int
    index: int
    site: tuple[int, int]
    operands: tuple[int, int]


@dataclass(frozen=True)
class Cycle:
    index: int
    movements: tuple[Movement, ...]
    gate_events: tuple[GateEvent, ...]
    transfers: tuple[tuple[int, str], ...]  # (qubit, "to_aod" | "to_slm")


@dataclass(frozen=True)
class ExecutionSequence:
    """One committed circuit's cycles, starting at the array's cycle 0."""

    circuit_id: int
    name: str
    num_qubits: int
    cycles: tuple[Cycle, ...]
    strict_exclusivity: bool = True

    @property
    def horizon(self) -> int:
        return len(self.cycles)

    def positions_at(self, k: int) -> dict[int, tuple[int, int]]:
        """Replay movements up to cycle ``k`` (inclusive)."""
        pos: dict[int, tuple[int, int]] = {}
        for cycle in self.cycles[: k + 1]:
            for m in cycle.movements:
                pos[m.qubit] = m.end
        return pos

    def to_json(self) -> str:
        return json.dumps({
            "circuit": self.name,
            "cycles": [
                {
                    "k": c.index,
                    "movements": [
                        {"qubit": m.qubit, "from": list(m.start), "to": list(m.end)}
                        for m in c.movements
                    ],
                    "gates": [
                        {"site": list(g.site), "ops": list(g.operands)}
                        for g in c.gate_events
                    ],
                    "transfers": [[q, d] for q, d in c.transfers],
                }
                for c in self.cycles
            ],
        })


def decompose_to_cycles(sched, circuit_id: int = 0) -> ExecutionSequence:
    """Decompose a compiled schedule into its cycle-wise execution sequence.

    Cycle 0 carries the initial placement (zero-length movements for every
    atom); cycle k >= 1 carries the motion of every atom that departed
    stage k-1 in a mobile trap, plus trap transfers and the stage's gates.
    """
    events_by_stage: dict[int, list[GateEvent]] = {}
    for gate_id, stage in sched.gate_stage.items():
        gate = sched.circuit.gates[gate_id]
        site = sched.stages[stage].pos[gate.qubits[0]]
        events_by_stage.setdefault(stage, []).append(
            GateEvent(circuit_id, stage, gate_id, site, gate.qubits)
        )

    cycles: list[Cycle] = []
    for k in range(sched.num_stages):
        st = sched.stages[k]
        movements: list[Movement] = []
        transfers: list[tuple[int, str]] = []
        if k == 0:
            for q in range(sched.circuit.num_qubits):
                movements.append(Movement(circuit_id, 0, len(movements), q, st.pos[q], st.pos[q]))
        else:
            prev = sched.stages[k - 1]
            for q in range(sched.circuit.num_qubits):
                if prev.aod[q]:
                    movements.append(
                        Movement(circuit_id, k, len(movements), q, prev.pos[q], st.pos[q])
                    )
                elif st.pos[q] != prev.pos[q]:
                    raise DecompositionError(
                        f"qubit {q} moved {prev.pos[q]}->{st.pos[q]} into stage {k} "
                        "while held in a static trap"
                    )
                if st.aod[q] != prev.aod[q]:
                    transfers.append((q, "to_aod" if st.aod[q] else "to_slm"))
        cycles.append(Cycle(
            index=k,
            movements=tuple(movements),
            gate_events=tuple(sorted(events_by_stage.get(k, ()), key=lambda e: e.index)),
            transfers=tuple(transfers),
        ))
    return ExecutionSequence(
        circuit_id=circuit_id,
        name=sched.circuit.name,
        num_qubits=sched.circuit.num_qubits,
        cycles=tuple(cycles),
        strict_exclusivity=sched.strict_exclusivity,
    )


def row_rule_ok(existing: tuple[int, int], candidate: tuple[int, int]) -> bool:
    """Order-preservation of a candidate row motion against a committed one.

    A row moving y0->y1 forces any concurrent row starting below/above/at
    y0 to end below/above/at y1 respectively.
    """
    y0, y1 = existing
    ys, ye = candidate
    if ys < y0:
        return ye < y1
    if ys > y0:
        return ye > y1
    return ye == y1


def col_rule_ok(existing: tuple[int, int], candidate: tuple[int, int]) -> bool:
    """Mirror of :func:`row_rule_ok` on the x axis."""
    x0, x1 = existing
    xs, xe = candidate
    if xs < x0:
        return xe < x1
    if xs > x0:
        return xe > x1
    return xe == x1


@dataclass(frozen=True)
class ZoneMap:
    """Per-band zone classification for one cycle: a band is
    order-preserving iff some committed movement touches it."""

    columns: tuple[tuple[Movement, ...], ...]
    rows: tuple[tuple[Movement, ...], ...]

    def is_opz_column(self, x: int) -> bool:
        return bool(self.columns[x])

    def is_opz_row(self, y: int) -> bool:
        return bool(self.rows[y])


@dataclass
class ArrayOccupancy:
    """All committed sequences on one array, with per-cycle site caches.

    Constraints from a sequence apply only within its own horizon: once a
    circuit completes, its atoms are measured out and release their sites.
    """

    grid: GridSpec
    committed: list[ExecutionSequence] = field(default_factory=list)
    _positions: list[list[dict[int, tuple[int, int]]]] = field(default_factory=list)
    _aod_at_departure: list[list[set[int]]] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return max((seq.horizon for seq in self.committed), default=0)

    def movements_at(self, k: int) -> Iterator[Movement]:
        for seq in self.committed:
            if k < seq.horizon:
                yield from seq.cycles[k].movements

    def gate_events_at(self, k: int) -> Iterator[GateEvent]:
        for seq in self.committed:
            if k < seq.horizon:
                yield from seq.cycles[k].gate_events

    def occupied_sites(self, k: int) -> dict[tuple[int, int], tuple[int, int]]:
        """Sites held by committed atoms at cycle ``k`` -> (circuit, qubit)."""
        sites: dict[tuple[int, int], tuple[int, int]] = {}
        for s, seq in enumerate(self.committed):
            if k < seq.horizon:
                for q, pos in self._positions[s][k].items():
                    sites[pos] = (seq.circuit_id, q)
        return sites

    def static_atoms(self, k: int) -> dict[tuple[int, int], tuple[int, int]]:
        """The statically trapped subset of :meth:`occupied_sites`."""
        sites: dict[tuple[int, int], tuple[int, int]] = {}
        for s, seq in enumerate(self.committed):
            if k < seq.horizon:
                mobile = self._aod_at_departure[s][k]
                for q, pos in self._positions[s][k].items():
                    if q not in mobile:
                        sites[pos] = (seq.circuit_id, q)
        return sites

    def commit(self, seq: ExecutionSequence) -> None:
        """Append a sequence; its initial sites must be free at cycle 0."""
        if seq.horizon:
            taken = self.occupied_sites(0)
            for m in seq.cycles[0].movements:
                if not self.grid.in_bounds(m.end):
                    raise CommitError(f"initial site {m.end} outside the grid")
                if m.end in taken:
                    raise CommitError(
                        f"qubit {m.qubit} of {seq.name!r} starts on occupied site {m.end}"
                    )
        positions: list[dict[int, tuple[int, int]]] = []
        pos: dict[int, tuple[int, int]] = {}
        for cycle in seq.cycles:
            for m in cycle.movements:
                pos[m.qubit] = m.end
            positions.append(dict(pos))
        # An atom departs stage k in a mobile trap iff it has a movement
        # record in cycle k+1; the final stage's flags never matter.
        aod: list[set[int]] = []
        for k in range(seq.horizon):
            if k + 1 < seq.horizon:
                aod.append({m.qubit for m in seq.cycles[k + 1].movements})
            else:
                aod.append(set())
        self.committed.append(seq)
        self._positions.append(positions)
        self._aod_at_departure.append(aod)


def compute_zones(occ: ArrayOccupancy, cycle_index: int) -> ZoneMap:
    """Classify every row/column band for one cycle.

    A band is order-preserving iff a committed movement in that cycle
    traverses or terminates in it; the constraining movements are listed.
    """
    columns: list[list[Movement]] = [[] for _ in range(occ.grid.x_sites)]
    rows: list[list[Movement]] = [[] for _ in range(occ.grid.y_sites)]
    for m in occ.movements_at(cycle_index):
        for x in range(min(m.start[0], m.end[0]), max(m.start[0], m.end[0]) + 1):
            columns[x].append(m)
        for y in range(min(m.start[1], m.end[1]), max(m.start[1], m.end[1]) + 1):
            rows[y].append(m)
    return ZoneMap(
        columns=tuple(tuple(c) for c in columns),
        rows=tuple(tuple(r) for r in rows),
    )
