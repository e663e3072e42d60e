"""Constraint encoding and windowed solving of circuits onto one array.

The execution model discretizes the array into interaction sites.  At
every stage each atom sits at one site in either a static trap (``a=0``)
or a mobile trap (``a=1``).  Between stages only atoms departing in a
mobile trap may move; trap transfers happen in place at stage boundaries
and cost nothing.  Two atoms share a site exactly when a gate on that
pair executes there, and mobile-trap lines must never cross: concurrent
motion has to preserve coordinate order per axis.  Line indices are not
modelled explicitly; order preservation is asserted pairwise over every
contiguous interval in which both atoms stay mobile, which is equivalent
whenever the hardware has at least as many lines per axis as atoms (true
for every configuration shipped here).  Intervals reset at solve-window
boundaries, where atoms may be silently re-seated onto fresh lines.

Compilation against a non-empty array adds the cross-circuit families:
committed movements impose the order-preservation implications on every
mobile atom of the new circuit, and committed gate sites are excluded --
for the new gates' operands always, and, in strict-exclusivity mode, for
every atom of the new circuit, along with every site currently held by a
committed atom (so commits can never collide).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .arraystate import ArrayOccupancy, GridSpec, decompose_to_cycles
from .circuits import Circuit
from .solver import (
    DEFAULT_BACKEND,
    Deadline,
    IntVar,
    SolveBudgetExceeded,
    SolverBackend,
    and_,
    count_ge,
    eq,
    ge,
    gt,
    implies,
    le,
    lt,
    ne,
    or_,
)

log = logging.getLogger(__name__)

# Node allowance for optional solver probes (extra-gate packing and stage
# squeezing); an exhausted probe is abandoned, not treated as unsat.
PROBE_NODE_BUDGET = 20_000

# Node allowance for mandatory window checks when compiling against a
# non-empty array.  Refuting a window there can be brutally expensive, and
# an exhausted check simply routes the solve toward wider windows or a
# from-scratch retry; on an empty array checks stay unbounded so that
# "grid too small" is only ever reported after a definitive proof.
HARD_NODE_BUDGET = 200_000

CONSTRAINT_FAMILIES = (
    "bounds",
    "trap",
    "aod-order",
    "gate-exec",
    "exclusivity",
    "dependency",
    "multiprogram-movement",
    "multiprogram-gates",
)


class GridTooSmallError(ValueError):
    """The circuit cannot be realized on the given grid."""


class ExtractionError(RuntimeError):
    """A declared variable was missing from the solver model."""


class CompileTimeoutError(Exception):
    """Budget ran out; carries whatever progress was made."""

    def __init__(self, circuit_name: str, scheduled_gates: int, total_gates: int,
                 stages_done: int):
        self.circuit_name = circuit_name
        self.scheduled_gates = scheduled_gates
        self.total_gates = total_gates
        self.stages_done = stages_done
        super().__init__(
            f"compilation of {circuit_name!r} timed out after scheduling "
            f"{scheduled_gates}/{total_gates} gates in {stages_done} stages"
        )


class MultiProgramError(Exception):
    """One or more circuits of a workload failed; carries the partial result."""

    def __init__(self, failed: list[tuple[str, Exception]], schedules, occupancy):
        self.failed = failed
        self.schedules = schedules
        self.occupancy = occupancy
        names = ", ".join(repr(n) for n, _ in failed)
        super().__init__(f"compilation failed for {names}")


@dataclass(frozen=True)
class StageState:
    """Site and trap flag of every qubit at one stage."""

    pos: tuple[tuple[int, int], ...]
    aod: tuple[bool, ...]


@dataclass
class CompiledSchedule:
    circuit: Circuit
    stages: tuple[StageState, ...]
    gate_stage: dict[int, int]
    strict_exclusivity: bool = True
    solve_seconds: float = 0.0

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    def summary(self) -> dict:
        return {
            "circuit": self.circuit.name,
            "stages": self.num_stages,
            "solve_seconds": self.solve_seconds,
        }


@dataclass
class VariableSet:
    """Declared solver variables: per qubit and stage the site coordinates
    and trap flag, plus one execution-stage variable per gate."""

    x: list[list[IntVar]]
    y: list[list[IntVar]]
    a: list[list[IntVar]]
    gate_stage: list[IntVar]
    horizon: int


@dataclass
class EncodedProblem:
    variables: VariableSet
    horizon: int
    families: dict[str, list]
    backend: SolverBackend
    circuit: Circuit
    grid: GridSpec
    strict_exclusivity: bool = True


def _dependency_edges(circuit: Circuit) -> list[tuple[int, int]]:
    last: dict[int, int] = {}
    edges = []
    for g in circuit.gates:
        for q in g.qubits:
            if q in last:
                edges.append((last[q], g.id))
            last[q] = g.id
    return edges


def _pair_key(q0: int, q1: int) -> tuple[int, int]:
    return (q0, q1) if q0 < q1 else (q1, q0)


class _Window:
    """One encoded stage window, possibly chained onto a fixed boundary."""

    def __init__(
        self,
        backend: SolverBackend,
        circuit: Circuit,
        grid: GridSpec,
        *,
        start: int,
        num_stages: int,
        candidates: list[int],
        allow_defer: bool,
        boundary: StageState | None,
        occupancy: ArrayOccupancy | None,
        strict: bool,
        with_dependencies: bool,
    ):
        self.backend = backend
        self.circuit = circuit
        self.grid = grid
        self.start = start
        self.num_stages = num_stages
        self.candidates = candidates
        self.allow_defer = allow_defer
        self.boundary = boundary
        self.families: dict[str, list] = {name: [] for name in CONSTRAINT_FAMILIES}
        nq = circuit.num_qubits
        T = num_stages

        # Preferred values survive search restarts: gates lean toward the
        # earliest stage, atoms toward static traps.
        defer = T if allow_defer else T - 1
        self.tg = {g: backend.new_int(f"t_g{g}", 0, defer, prefer=0) for g in candidates}
        if boundary is not None:
            self.ba = [backend.new_bool(f"a_q{q}_b", prefer=0) for q in range(nq)]
        else:
            self.ba = None
        # Declaration order doubles as the search order: keep gate
        # operands adjacent so conflicts between partners surface early.
        # Position hints point at where each qubit last sat (atoms mostly
        # stay put); with no boundary yet, spread qubits over the lattice
        # so the first placement starts out collision-free.
        qubit_order: list[int] = []
        for g in candidates:
            for q in circuit.gates[g].qubits:
                if q not in qubit_order:
                    qubit_order.append(q)
        qubit_order.extend(q for q in range(nq) if q not in qubit_order)
        self.a = [[None] * T for _ in range(nq)]
        self.x = [[None] * T for _ in range(nq)]
        self.y = [[None] * T for _ in range(nq)]
        for k in range(T):
            for q in qubit_order:
                if boundary is not None:
                    hint = boundary.pos[q]
                else:
                    hint = (q % grid.x_sites, (q // grid.x_sites) % grid.y_sites)
                self.a[q][k] = backend.new_bool(f"a_q{q}_s{start + k}", prefer=0)
                self.x[q][k] = backend.new_int(
                    f"x_q{q}_s{start + k}", 0, grid.x_sites - 1, prefer=hint[0],
                )
                self.y[q][k] = backend.new_int(
                    f"y_q{q}_s{start + k}", 0, grid.y_sites - 1, prefer=hint[1],
                )
        self.families["bounds"] = [(v.name, v.lo, v.hi) for v in backend.variables]

        self._emit_trap()
        self._emit_aod_order()
        self._emit_gates()
        self._emit_exclusivity()
        if with_dependencies:
            self._emit_dependencies()
        if occupancy is not None:
            self._emit_multiprogram(occupancy, strict)

    # stage index k is window-relative; k = -1 addresses the boundary.
    def _px(self, q: int, k: int):
        return self.boundary.pos[q][0] if k < 0 else self.x[q][k]

    def _py(self, q: int, k: int):
        return self.boundary.pos[q][1] if k < 0 else self.y[q][k]

    def _pa(self, q: int, k: int):
        return self.ba[q] if k < 0 else self.a[q][k]

    def _lowest(self) -> int:
        return -1 if self.boundary is not None else 0

    def _colocated(self, u: int, v: int, k: int):
        return and_(eq(self.x[u][k], self.x[v][k]), eq(self.y[u][k], self.y[v][k]))

    def _add(self, family: str, formula) -> None:
        self.families[family].append(formula)
        self.backend.add(formula)

    def _emit_trap(self) -> None:
        nq = self.circuit.num_qubits
        lo = self._lowest()
        for q in range(nq):
            for k in range(self.num_stages):
                if k - 1 < lo:
                    continue  # free initial placement
                frozen = and_(eq(self.x[q][k], self._px(q, k - 1)),
                              eq(self.y[q][k], self._py(q, k - 1)))
                self._add("trap", implies(eq(self._pa(q, k - 1), 0), frozen))
        # No trap transfer while two atoms share a site.
        for u in range(nq):
            for v in range(u + 1, nq):
                for k in range(self.num_stages):
                    if k - 1 < lo:
                        continue
                    keep = and_(eq(self.a[u][k], self._pa(u, k - 1)),
                                eq(self.a[v][k], self._pa(v, k - 1)))
                    self._add("trap", implies(self._colocated(u, v, k), keep))

    def _emit_aod_order(self) -> None:
        """Per-axis order preservation over every contiguous co-mobile
        interval: some consistent line order must hold across the interval
        and one stage past it (the arrival of its last move)."""
        nq = self.circuit.num_qubits
        lo = self._lowest()
        last = self.num_stages - 1
        for u in range(nq):
            for v in range(u + 1, nq):
                for i0 in range(lo, self.num_stages):
                    for i1 in range(i0, self.num_stages):
                        end = min(i1 + 1, last)
                        if end <= i0:
                            continue  # no step involved
                        guard = and_(*[
                            and_(eq(self._pa(u, k), 1), eq(self._pa(v, k), 1))
                            for k in range(i0, i1 + 1)
                        ])
                        for proj in (self._px, self._py):
                            le_run = and_(*[le(proj(u, k), proj(v, k)) for k in range(i0, end + 1)])
                            ge_run = and_(*[ge(proj(u, k), proj(v, k)) for k in range(i0, end + 1)])
                            self._add("aod-order", implies(guard, or_(le_run, ge_run)))

    def _emit_gates(self) -> None:
        for g in self.candidates:
            p, q = self.circuit.gates[g].qubits
            for k in range(self.num_stages):
                together = and_(eq(self.x[p][k], self.x[q][k]), eq(self.y[p][k], self.y[q][k]))
                self._add("gate-exec", implies(eq(self.tg[g], k), together))

    def _emit_exclusivity(self) -> None:
        nq = self.circuit.num_qubits
        by_pair: dict[tuple[int, int], list[int]] = {}
        for g in self.candidates:
            by_pair.setdefault(_pair_key(*self.circuit.gates[g].qubits), []).append(g)
        for u in range(nq):
            for v in range(u + 1, nq):
                gates_here = by_pair.get((u, v), [])
                for k in range(self.num_stages):
                    # Co-location happens exactly when a gate on this pair fires.
                    fires = or_(*[eq(self.tg[g], k) for g in gates_here])
                    self._add("exclusivity", implies(self._colocated(u, v, k), fires))
                # Static traps hold one atom each.
                for k in range(self._lowest(), self.num_stages):
                    if k < 0:
                        if self.boundary.pos[u] == self.boundary.pos[v]:
                            self._add("exclusivity", or_(eq(self.ba[u], 1), eq(self.ba[v], 1)))
                        continue
                    self._add("exclusivity", or_(
                        eq(self.a[u][k], 1), eq(self.a[v][k], 1),
                        ne(self.x[u][k], self.x[v][k]), ne(self.y[u][k], self.y[v][k]),
                    ))

    def _emit_dependencies(self) -> None:
        in_window = set(self.candidates)
        for before, after in _dependency_edges(self.circuit):
            if before in in_window and after in in_window:
                self._add("dependency", lt(self.tg[before], self.tg[after]))

    def _emit_multiprogram(self, occ: ArrayOccupancy, strict: bool) -> None:
        nq = self.circuit.num_qubits
        for k in range(self.num_stages):
            t = self.start + k
            if t >= 1 and (k - 1 >= self._lowest()):
                for m in occ.movements_at(t):
                    (x0, y0), (x1, y1) = m.start, m.end
                    for q in range(nq):
                        mobile = eq(self._pa(q, k - 1), 1)
                        for prev, cur, c0, c1 in (
                            (self._px(q, k - 1), self.x[q][k], x0, x1),
                            (self._py(q, k - 1), self.y[q][k], y0, y1),
                        ):
                            self._add("multiprogram-movement",
                                      implies(and_(mobile, lt(prev, c0)), lt(cur, c1)))
                            self._add("multiprogram-movement",
                                      implies(and_(mobile, gt(prev, c0)), gt(cur, c1)))
                            self._add("multiprogram-movement",
                                      implies(and_(mobile, eq(prev, c0)), eq(cur, c1)))
            for e in occ.gate_events_at(t):
                ex, ey = e.site
                for g in self.candidates:
                    for operand in self.circuit.gates[g].qubits:
                        clear = or_(ne(self.x[operand][k], ex), ne(self.y[operand][k], ey))
                        self._add("multiprogram-gates", implies(eq(self.tg[g], k), clear))
                if strict:
                    for q in range(nq):
                        self._add("multiprogram-gates",
                                  or_(ne(self.x[q][k], ex), ne(self.y[q][k], ey)))
            if strict:
                for (sx, sy) in occ.occupied_sites(t):
                    for q in range(nq):
                        self._add("multiprogram-gates",
                                  or_(ne(self.x[q][k], sx), ne(self.y[q][k], sy)))

    def scheduled_bound(self, n: int):
        """At least ``n`` candidate gates scheduled inside the window."""
        return count_ge([le(self.tg[g], self.num_stages - 1) for g in self.candidates], n)

    def squeeze_bound(self, depth: int):
        """Every scheduled gate fires within the first ``depth`` stages."""
        return and_(*[
            or_(le(var, depth - 1), eq(var, self.num_stages))
            for var in self.tg.values()
        ])

    def read_model(self) -> tuple[list[StageState], dict[int, int], list[bool] | None]:
        model = self.backend.model()
        stages = []
        nq = self.circuit.num_qubits
        for k in range(self.num_stages):
            pos = tuple((model[self.x[q][k].name], model[self.y[q][k].name]) for q in range(nq))
            aod = tuple(bool(model[self.a[q][k].name]) for q in range(nq))
            stages.append(StageState(pos, aod))
        scheduled = {
            g: self.start + model[var.name]
            for g, var in self.tg.items()
            if model[var.name] < self.num_stages or not self.allow_defer
        }
        boundary_aod = None
        if self.ba is not None:
            boundary_aod = [bool(model[v.name]) for v in self.ba]
        return stages, scheduled, boundary_aod


def encode_base(
    circuit: Circuit,
    grid: GridSpec,
    horizon: int,
    backend: SolverBackend | None = None,
    strict_exclusivity: bool = True,
) -> EncodedProblem:
    """Encode the whole circuit over ``horizon`` stages on an empty array.

    Every gate receives an execution-stage variable in ``[0, horizon)``;
    infeasibility surfaces at solve time, never here.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if backend is None:
        backend = DEFAULT_BACKEND()
    win = _Window(
        backend, circuit, grid,
        start=0, num_stages=horizon,
        candidates=[g.id for g in circuit.gates],
        allow_defer=False, boundary=None, occupancy=None,
        strict=strict_exclusivity, with_dependencies=True,
    )
    variables = VariableSet(
        x=win.x, y=win.y, a=win.a,
        gate_stage=[win.tg[g.id] for g in circuit.gates],
        horizon=horizon,
    )
    problem = EncodedProblem(
        variables=variables, horizon=horizon, families=win.families,
        backend=backend, circuit=circuit, grid=grid,
        strict_exclusivity=strict_exclusivity,
    )
    problem._window = win  # keep emission context for encode_multiprogram
    return problem


def encode_multiprogram(problem: EncodedProblem, occ: ArrayOccupancy) -> EncodedProblem:
    """Add the cross-circuit constraint families of a committed occupancy.

    Stages of the new circuit align with occupancy cycles one to one;
    stages beyond the occupancy horizon stay unconstrained.
    """
    win: _Window = problem._window
    win._emit_multiprogram(occ, problem.strict_exclusivity)
    problem.families["multiprogram-movement"] = win.families["multiprogram-movement"]
    problem.families["multiprogram-gates"] = win.families["multiprogram-gates"]
    return problem


def extract_schedule(model: dict[str, int], variables: VariableSet,
                     circuit: Circuit, grid: GridSpec,
                     strict_exclusivity: bool = True) -> CompiledSchedule:
    """Read a sat model back into a schedule, trimming gate-free tail stages."""
    def read(var: IntVar) -> int:
        try:
            return model[var.name]
        except KeyError as exc:
            raise ExtractionError(f"model is missing variable {var.name!r}") from exc

    gate_stage = {g.id: read(variables.gate_stage[g.id]) for g in circuit.gates}
    num_stages = 1 + max(gate_stage.values(), default=-1)
    stages = []
    for k in range(num_stages):
        pos = tuple(
            (read(variables.x[q][k]), read(variables.y[q][k]))
            for q in range(circuit.num_qubits)
        )
        aod = tuple(bool(read(variables.a[q][k])) for q in range(circuit.num_qubits))
        stages.append(StageState(pos, aod))
    return CompiledSchedule(
        circuit=circuit, stages=tuple(stages), gate_stage=gate_stage,
        strict_exclusivity=strict_exclusivity,
    )


def _frontier(circuit: Circuit, pending: set[int]) -> list[int]:
    edges = _dependency_edges(circuit)
    blocked = {after for before, after in edges if before in pending}
    return sorted(g for g in pending if g not in blocked)


class _Stuck(Exception):
    """The greedy committed itself into a corner against the occupancy."""


def solve_window(
    circuit: Circuit,
    grid: GridSpec,
    occ: ArrayOccupancy | None = None,
    budget: float | None = None,
    *,
    window: int = 2,
    strict_exclusivity: bool = True,
    backend_factory=DEFAULT_BACKEND,
) -> CompiledSchedule:
    """Greedy windowed compilation of one circuit against an occupancy.

    Repeatedly encodes a ``window``-stage slab starting at the current
    frontier, schedules as many dependency-ready gates as will fit
    (iterative deepening on the gate count, then squeezing those gates
    into the earliest stages so the committed prefix stays dense), then
    commits the model's prefix.  The last solved stage is never committed
    when avoidable: it remains a witness that the committed boundary can
    be continued.

    A short window can still trap the greedy: committed traffic may doom
    a boundary several cycles later.  When that happens the circuit is
    re-solved once with the window stretched over the whole occupancy
    horizon, making every committed constraint visible at once.
    """
    if circuit.num_qubits > grid.num_sites:
        raise GridTooSmallError(
            f"{circuit.num_qubits} qubits cannot fit {grid.num_sites} sites"
        )
    deadline = Deadline(budget)
    t0 = time.monotonic()
    progress = {"gates": 0, "stages": 0}
    try:
        try:
            stages, gate_stage = _greedy_rounds(
                circuit, grid, occ, deadline, window,
                strict_exclusivity, backend_factory, progress,
            )
        except _Stuck:
            full_span = (occ.horizon if occ else 0) + window
            if full_span <= window:
                raise _Stuck from None
            stages, gate_stage = _greedy_rounds(
                circuit, grid, occ, deadline, full_span,
                strict_exclusivity, backend_factory, progress,
            )
    except SolveBudgetExceeded as exc:
        raise CompileTimeoutError(
            circuit.name, progress["gates"], circuit.num_gates, progress["stages"]
        ) from exc
    except _Stuck as exc:
        against = "the committed circuits" if occ and occ.horizon else "an empty array"
        raise GridTooSmallError(
            f"no placement found for {circuit.name!r} against {against}"
        ) from exc

    return CompiledSchedule(
        circuit=circuit,
        stages=tuple(stages),
        gate_stage=gate_stage,
        strict_exclusivity=strict_exclusivity,
        solve_seconds=time.monotonic() - t0,
    )


def _greedy_rounds(
    circuit: Circuit,
    grid: GridSpec,
    occ: ArrayOccupancy | None,
    deadline: Deadline,
    window: int,
    strict_exclusivity: bool,
    backend_factory,
    progress: dict | None = None,
) -> tuple[list[StageState], dict[int, int]]:
    pending = {g.id for g in circuit.gates}
    committed: list[StageState] = []
    gate_stage: dict[int, int] = {}
    boundary: StageState | None = None

    def build(T: int, candidates: list[int]) -> _Window:
        return _Window(
            backend_factory(), circuit, grid,
            start=len(committed), num_stages=T, candidates=candidates,
            allow_defer=True, boundary=boundary, occupancy=occ,
            strict=strict_exclusivity, with_dependencies=False,
        )

    def attempt(win: _Window, bound, what: str,
                node_budget: int | None = None) -> bool | None:
        win.backend.push()
        win.backend.add(bound)
        started = time.monotonic()
        sat = win.backend.check(deadline, node_budget)
        if log.isEnabledFor(logging.DEBUG):
            log.debug(
                "%s: S=%d T=%d %s -> %s in %.3fs",
                circuit.name, win.start, win.num_stages, what, sat,
                time.monotonic() - started,
            )
        if sat is not True:
            win.backend.pop()
        return sat

    occupied = occ is not None and occ.horizon > 0
    hard_budget = HARD_NODE_BUDGET if occupied else None

    idle_streak = 0
    while pending:
        deadline.check()
        candidates = _frontier(circuit, pending)
        n_hi = min(len(candidates), window * max(1, circuit.num_qubits // 2))
        chosen: _Window | None = None
        snapshot = None
        win_k = build(window, candidates)
        first = attempt(win_k, win_k.scheduled_bound(1), "n>=1", hard_budget)
        if first is True:
            chosen = win_k
            snapshot = chosen.read_model()
            # Pack in more ready gates while the probes stay cheap;
            # giving up early just means a thinner window.
            for n in range(2, n_hi + 1):
                if attempt(win_k, win_k.scheduled_bound(n), f"n>={n}",
                           PROBE_NODE_BUDGET) is not True:
                    break
                snapshot = chosen.read_model()
        if chosen is None:
            # Nothing fits the nominal window.  Widen until the slab
            # clears the occupancy horizon; past it the array is
            # effectively empty, so a definitive failure on an empty
            # array means the grid itself is too small.
            occ_rem = max(0, (occ.horizon if occ else 0) - len(committed))
            if occ_rem == 0:
                if boundary is None and first is False:
                    raise GridTooSmallError(
                        f"no placement for any ready gate of {circuit.name!r} "
                        f"within {window} stages on an empty array"
                    )
                raise _Stuck
            cap = occ_rem + window
            T = window
            while chosen is None:
                T = min(T * 2, cap)
                wide = build(T, candidates)
                if attempt(wide, wide.scheduled_bound(1), "widen n>=1",
                           hard_budget) is True:
                    chosen = wide
                    snapshot = chosen.read_model()
                elif T >= cap:
                    raise _Stuck
        # Squeeze the scheduled gates into the earliest stages.  The
        # encode keeps its full span, so the model always proves the
        # committed prefix can be continued.  Depths the current model
        # already satisfies are not worth re-solving.
        model_span = 1 + max(s - chosen.start for s in snapshot[1].values())
        for depth in range(1, model_span):
            if attempt(chosen, chosen.squeeze_bound(depth), f"squeeze<={depth}",
                       PROBE_NODE_BUDGET) is True:
                snapshot = chosen.read_model()
                break

        stages, scheduled, boundary_aod = snapshot
        if boundary_aod is not None:
            committed[-1] = StageState(committed[-1].pos, tuple(boundary_aod))
        last_rel = max(s - chosen.start for s in scheduled.values())
        commit_rel = max(0, min(last_rel, chosen.num_stages - 2))
        committed.extend(stages[: commit_rel + 1])
        kept = {g: s for g, s in scheduled.items() if s - chosen.start <= commit_rel}
        gate_stage.update(kept)
        pending -= set(kept)
        boundary = committed[-1]
        if progress is not None:
            progress["gates"] = len(gate_stage)
            progress["stages"] = len(committed)
        idle_streak = idle_streak + 1 if not kept else 0
        if idle_streak > (occ.horizon if occ else 0) + window + 2:
            raise _Stuck
    return committed, gate_stage


@dataclass
class CompileOutcome:
    """Per-circuit result of a multi-program compile on one array."""

    name: str
    status: str  # ok | timeout | grid-too-small
    schedule: CompiledSchedule | None
    seconds: float
    joint_stages: int
    error: Exception | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def compile_each(
    circuits: list[Circuit],
    grid: GridSpec,
    occ: ArrayOccupancy | None = None,
    budget: float | None = None,
    *,
    window: int = 2,
    strict_exclusivity: bool = True,
    backend_factory=DEFAULT_BACKEND,
) -> tuple[list[CompileOutcome], ArrayOccupancy]:
    """Compile circuits in order onto one array, committing each success.

    ``budget`` applies per circuit.  Failures are recorded, never raised;
    a failed circuit is simply not committed.
    """
    if occ is None:
        occ = ArrayOccupancy(grid)
    outcomes: list[CompileOutcome] = []
    for i, circuit in enumerate(circuits):
        started = time.monotonic()
        try:
            sched = solve_window(
                circuit, grid, occ, budget,
                window=window, strict_exclusivity=strict_exclusivity,
                backend_factory=backend_factory,
            )
            occ.commit(decompose_to_cycles(sched, circuit_id=len(occ.committed)))
            status, error = "ok", None
        except CompileTimeoutError as exc:
            sched, status, error = None, "timeout", exc
        except GridTooSmallError as exc:
            sched, status, error = None, "grid-too-small", exc
        joint = max((s.horizon for s in occ.committed), default=0)
        outcomes.append(CompileOutcome(
            name=circuit.name, status=status, schedule=sched,
            seconds=time.monotonic() - started, joint_stages=joint, error=error,
        ))
    return outcomes, occ


def compile_on_array(
    circuits: list[Circuit],
    grid: GridSpec,
    budget: float | None = None,
    **kwargs,
) -> tuple[list[CompiledSchedule], ArrayOccupancy]:
    """Compile an ordered workload onto one initially empty array.

    Raises :class:`MultiProgramError` naming the failed circuits while
    carrying the schedules that did succeed.
    """
    outcomes, occ = compile_each(circuits, grid, None, budget, **kwargs)
    schedules = [o.schedule for o in outcomes if o.ok]
    failed = [(o.name, o.error) for o in outcomes if not o.ok]
    if failed:
        raise MultiProgramError(failed, schedules, occ)
    return schedules, occ
