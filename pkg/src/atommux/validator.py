"""Independent brute-force checker for compiled schedules.

Every constraint family is re-verified directly against the stage data,
with no code shared with the compiler's constraint construction.  All
violations are collected, not just the first, and serialize to JSON
lines for diffing.

Single-schedule checks: gate operands co-located; any two co-located
atoms are exactly the operands of a gate firing at that stage; atoms in
static traps never move; mobile atoms moving concurrently never invert
their coordinate order on either axis; gates sharing a qubit execute in
circuit order; all sites in bounds.

Joint checks across committed sequences: every committed movement and
every other circuit's concurrent mobile motion must agree in direction
sign on both axes (the order-preservation implications), and gate sites
must not collide across circuits at the same cycle -- for the other
circuit's gate operands always, and for all of its atoms when that
circuit was compiled under strict exclusivity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .arraystate import ArrayOccupancy, ExecutionSequence, GridSpec

GATE_NOT_COLOCATED = "GateNotColocated"
EXCLUSIVITY_BREACH = "ExclusivityBreach"
AOD_CROSSING = "AODCrossing"
SLM_DRIFT = "SLMDrift"
DEPENDENCY_ORDER = "DependencyOrder"
CROSS_CIRCUIT_MOVEMENT = "CrossCircuitMovement"
CROSS_CIRCUIT_GATE_SITE = "CrossCircuitGateSite"
OUT_OF_BOUNDS = "OutOfBounds"

ALL_KINDS = (
    GATE_NOT_COLOCATED,
    EXCLUSIVITY_BREACH,
    AOD_CROSSING,
    SLM_DRIFT,
    DEPENDENCY_ORDER,
    CROSS_CIRCUIT_MOVEMENT,
    CROSS_CIRCUIT_GATE_SITE,
    OUT_OF_BOUNDS,
)


@dataclass(frozen=True)
class Violation:
    kind: str
    stage: int
    entities: tuple
    detail: str


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, stage: int, entities: tuple, detail: str) -> None:
        self.violations.append(Violation(kind, stage, entities, detail))

    def extend(self, other: "ViolationReport") -> None:
        self.violations.extend(other.violations)

    def to_json_lines(self) -> str:
        return "\n".join(
            json.dumps({
                "kind": v.kind, "stage": v.stage,
                "entities": list(v.entities), "detail": v.detail,
            })
            for v in self.violations
        )


def _sign(a: int, b: int) -> int:
    return (a > b) - (a < b)


def validate_single(sched, grid: GridSpec) -> ViolationReport:
    """Check one compiled schedule against every within-circuit family."""
    report = ViolationReport()
    circuit = sched.circuit
    nq = circuit.num_qubits

    for t, st in enumerate(sched.stages):
        for q in range(nq):
            if not grid.in_bounds(st.pos[q]):
                report.add(OUT_OF_BOUNDS, t, (q,),
                           f"qubit {q} at {st.pos[q]} outside {grid.x_sites}x{grid.y_sites}")

    gates_at: dict[int, list[int]] = {}
    for gid, t in sched.gate_stage.items():
        gates_at.setdefault(t, []).append(gid)
        if not (0 <= t < sched.num_stages):
            report.add(OUT_OF_BOUNDS, t, (gid,), f"gate {gid} scheduled outside the horizon")
            continue
        q0, q1 = circuit.gates[gid].qubits
        st = sched.stages[t]
        if st.pos[q0] != st.pos[q1]:
            report.add(GATE_NOT_COLOCATED, t, (gid, q0, q1),
                       f"gate {gid} operands at {st.pos[q0]} and {st.pos[q1]}")

    # Co-location is legal exactly for the operand pair of a firing gate.
    for t, st in enumerate(sched.stages):
        firing = {
            frozenset(circuit.gates[g].qubits): g
            for g in gates_at.get(t, [])
        }
        for u in range(nq):
            for v in range(u + 1, nq):
                if st.pos[u] == st.pos[v] and frozenset((u, v)) not in firing:
                    report.add(EXCLUSIVITY_BREACH, t, (u, v),
                               f"qubits {u} and {v} share site {st.pos[u]} with no gate on them")

    for t in range(1, sched.num_stages):
        prev, cur = sched.stages[t - 1], sched.stages[t]
        for q in range(nq):
            if not prev.aod[q] and cur.pos[q] != prev.pos[q]:
                report.add(SLM_DRIFT, t, (q,),
                           f"statically trapped qubit {q} moved {prev.pos[q]}->{cur.pos[q]}")
        movers = [q for q in range(nq) if prev.aod[q]]
        for i, u in enumerate(movers):
            for v in movers[i + 1:]:
                for axis in (0, 1):
                    s0 = _sign(prev.pos[u][axis], prev.pos[v][axis])
                    s1 = _sign(cur.pos[u][axis], cur.pos[v][axis])
                    if s0 != 0 and s1 != 0 and s0 != s1:
                        report.add(AOD_CROSSING, t, (u, v),
                                   f"mobile qubits {u} and {v} swapped order on axis {axis} "
                                   f"entering stage {t}")

    last_stage: dict[int, tuple[int, int]] = {}
    for gate in circuit.gates:
        t = sched.gate_stage.get(gate.id)
        if t is None:
            continue
        for q in gate.qubits:
            if q in last_stage:
                prev_gate, prev_t = last_stage[q]
                if t <= prev_t:
                    report.add(DEPENDENCY_ORDER, t, (prev_gate, gate.id),
                               f"gate {gate.id} at stage {t} not after gate {prev_gate} "
                               f"at stage {prev_t} on qubit {q}")
            last_stage[q] = (gate.id, t)
    return report


def _sequence_tracks(seq: ExecutionSequence):
    """Replay a sequence into per-cycle positions and recorded movers."""
    positions: list[dict[int, tuple[int, int]]] = []
    pos: dict[int, tuple[int, int]] = {}
    for cycle in seq.cycles:
        for m in cycle.movements:
            pos[m.qubit] = m.end
        positions.append(dict(pos))
    return positions


def _validate_sequence(seq: ExecutionSequence, grid: GridSpec) -> ViolationReport:
    """Single-circuit families re-checked on a committed sequence."""
    report = ViolationReport()
    positions = _sequence_tracks(seq)

    for cycle in seq.cycles:
        for m in cycle.movements:
            for site in (m.start, m.end):
                if not grid.in_bounds(site):
                    report.add(OUT_OF_BOUNDS, cycle.index, (m.qubit,),
                               f"movement of qubit {m.qubit} touches {site} outside the grid")
        for e in cycle.gate_events:
            for q in e.operands:
                if positions[cycle.index].get(q) != e.site:
                    report.add(GATE_NOT_COLOCATED, cycle.index, (e.index, q),
                               f"gate {e.index} at {e.site} but qubit {q} sits at "
                               f"{positions[cycle.index].get(q)}")
        gate_pairs = {frozenset(e.operands) for e in cycle.gate_events}
        at_site: dict[tuple[int, int], list[int]] = {}
        for q, p in positions[cycle.index].items():
            at_site.setdefault(p, []).append(q)
        for p, qs in at_site.items():
            for i, u in enumerate(qs):
                for v in qs[i + 1:]:
                    if frozenset((u, v)) not in gate_pairs:
                        report.add(EXCLUSIVITY_BREACH, cycle.index, (u, v),
                                   f"qubits {u} and {v} share site {p} with no gate on them")
        if cycle.index >= 1:
            ms = cycle.movements
            for i, a in enumerate(ms):
                for b in ms[i + 1:]:
                    for axis in (0, 1):
                        s0 = _sign(a.start[axis], b.start[axis])
                        s1 = _sign(a.end[axis], b.end[axis])
                        if s0 != 0 and s1 != 0 and s0 != s1:
                            report.add(AOD_CROSSING, cycle.index, (a.qubit, b.qubit),
                                       f"movements of qubits {a.qubit} and {b.qubit} cross "
                                       f"on axis {axis}")

    last_event: dict[int, tuple[int, int]] = {}
    events = sorted(
        (e for c in seq.cycles for e in c.gate_events), key=lambda e: e.index
    )
    for e in events:
        for q in e.operands:
            if q in last_event:
                prev_idx, prev_cycle = last_event[q]
                if e.cycle <= prev_cycle:
                    report.add(DEPENDENCY_ORDER, e.cycle, (prev_idx, e.index),
                               f"gate {e.index} at cycle {e.cycle} not after gate {prev_idx} "
                               f"at cycle {prev_cycle} on qubit {q}")
            last_event[q] = (e.index, e.cycle)
    return report


def validate_joint(occ: ArrayOccupancy) -> ViolationReport:
    """Check all committed sequences singly and pairwise."""
    report = ViolationReport()
    tracks = []
    for seq in occ.committed:
        report.extend(_validate_sequence(seq, occ.grid))
        tracks.append(_sequence_tracks(seq))

    n = len(occ.committed)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a, b = occ.committed[i], occ.committed[j]
            # Movement-vs-movement direction agreement (both axes); the
            # implication set is symmetric, so scan ordered pairs once.
            if j > i:
                for k in range(1, min(a.horizon, b.horizon)):
                    for ma in a.cycles[k].movements:
                        for mb in b.cycles[k].movements:
                            for axis in (0, 1):
                                s0 = _sign(mb.start[axis], ma.start[axis])
                                s1 = _sign(mb.end[axis], ma.end[axis])
                                if s0 != s1:
                                    report.add(
                                        CROSS_CIRCUIT_MOVEMENT, k,
                                        (a.circuit_id, ma.qubit, b.circuit_id, mb.qubit),
                                        f"movement of circuit {b.circuit_id} qubit {mb.qubit} "
                                        f"breaks order against circuit {a.circuit_id} "
                                        f"qubit {ma.qubit} on axis {axis}",
                                    )
            # Gate sites of circuit i versus circuit j's atoms.
            for k in range(min(a.horizon, b.horizon)):
                events = a.cycles[k].gate_events
                if not events:
                    continue
                b_pos = tracks[j][k]
                b_operands = {q for e in b.cycles[k].gate_events for q in e.operands}
                for e in events:
                    if b.strict_exclusivity:
                        exposed = list(b_pos.items())
                    else:
                        exposed = [(q, b_pos[q]) for q in sorted(b_operands)]
                    for q, p in exposed:
                        if p == e.site:
                            report.add(
                                CROSS_CIRCUIT_GATE_SITE, k,
                                (a.circuit_id, e.index, b.circuit_id, q),
                                f"circuit {b.circuit_id} qubit {q} occupies gate site "
                                f"{e.site} of circuit {a.circuit_id} at cycle {k}",
                            )
    return report


def stage_count(obj) -> int:
    """Rydberg stage count: one past the last stage that executes a gate."""
    if isinstance(obj, ArrayOccupancy):
        latest = -1
        for seq in obj.committed:
            for cycle in seq.cycles:
                if cycle.gate_events:
                    latest = max(latest, cycle.index)
        return latest + 1
    if isinstance(obj, ExecutionSequence):
        return 1 + max((c.index for c in obj.cycles if c.gate_events), default=-1)
    return 1 + max(obj.gate_stage.values(), default=-1)
