"""Finite-domain constraint solving behind a small pluggable interface.

Problems are built from bounded integer variables and a compact formula
language (comparisons, boolean combinators, cardinality).  Two engines
implement the same interface:

* :class:`ExhaustiveBackend` enumerates the full assignment product.  It
  is only usable on tiny problems and exists as an independent oracle for
  the search engine.
* :class:`BacktrackingBackend` runs depth-first search in declaration
  order with three-valued constraint evaluation: every constraint touching
  a just-bound variable is re-checked and prunes the branch as soon as it
  is definitely false.  Declaration order therefore doubles as the search
  order, which callers exploit by declaring the most constrained
  variables first.

Both engines support incremental ``push``/``pop`` of constraint frames
and honour a :class:`Deadline`.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass


class SolveBudgetExceeded(Exception):
    """Raised by a backend when its deadline expires mid-search."""


@dataclass
class Deadline:
    """Wall-clock budget; ``None`` seconds means unlimited."""

    seconds: float | None
    started: float = 0.0

    def __post_init__(self):
        self.started = time.monotonic()

    def remaining(self) -> float | None:
        if self.seconds is None:
            return None
        return self.seconds - (time.monotonic() - self.started)

    def expired(self) -> bool:
        r = self.remaining()
        return r is not None and r <= 0

    def check(self) -> None:
        if self.expired():
            raise SolveBudgetExceeded(f"budget of {self.seconds}s exhausted")


# --------------------------------------------------------------------------
# Formula language
# --------------------------------------------------------------------------

class IntVar:
    """Bounded integer variable; created through a backend.

    ``prefer`` is a search hint: backends that branch on values try it
    first.  It never affects satisfiability, only which model is found.
    """

    __slots__ = ("name", "lo", "hi", "index", "prefer")

    def __init__(self, name: str, lo: int, hi: int, index: int, prefer: int | None = None):
        if lo > hi:
            raise ValueError(f"variable {name}: empty domain [{lo}, {hi}]")
        self.name = name
        self.lo = lo
        self.hi = hi
        self.index = index
        self.prefer = prefer

    def value_order(self) -> tuple[int, ...]:
        values = range(self.lo, self.hi + 1)
        if self.prefer is None or not (self.lo <= self.prefer <= self.hi):
            return tuple(values)
        return (self.prefer, *[v for v in values if v != self.prefer])

    def __repr__(self):
        return f"IntVar({self.name})"


class Formula:
    __slots__ = ()


class Cmp(Formula):
    __slots__ = ("op", "a", "b")

    def __init__(self, op: str, a, b):
        self.op = op
        self.a = a
        self.b = b


class And(Formula):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)


class Or(Formula):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)


class Not(Formula):
    __slots__ = ("item",)

    def __init__(self, item):
        self.item = item


class Lit(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value


class CountGe(Formula):
    __slots__ = ("items", "bound")

    def __init__(self, items, bound: int):
        self.items = tuple(items)
        self.bound = bound


TRUE = Lit(True)
FALSE = Lit(False)

_OPS = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _cmp(op: str, a, b) -> Formula:
    # Constant-fold comparisons between two plain ints.
    if isinstance(a, int) and isinstance(b, int):
        return TRUE if _OPS[op](a, b) else FALSE
    return Cmp(op, a, b)


def eq(a, b) -> Formula:
    return _cmp("==", a, b)


def ne(a, b) -> Formula:
    return _cmp("!=", a, b)


def lt(a, b) -> Formula:
    return _cmp("<", a, b)


def le(a, b) -> Formula:
    return _cmp("<=", a, b)


def gt(a, b) -> Formula:
    return _cmp(">", a, b)


def ge(a, b) -> Formula:
    return _cmp(">=", a, b)


def and_(*items) -> Formula:
    kept = []
    for f in items:
        if isinstance(f, Lit):
            if not f.value:
                return FALSE
            continue
        kept.append(f)
    if not kept:
        return TRUE
    if len(kept) == 1:
        return kept[0]
    return And(kept)


def or_(*items) -> Formula:
    kept = []
    for f in items:
        if isinstance(f, Lit):
            if f.value:
                return TRUE
            continue
        kept.append(f)
    if not kept:
        return FALSE
    if len(kept) == 1:
        return kept[0]
    return Or(kept)


def not_(item) -> Formula:
    if isinstance(item, Lit):
        return FALSE if item.value else TRUE
    return Not(item)


def implies(p, q) -> Formula:
    return or_(not_(p), q)


def count_ge(items, bound: int) -> Formula:
    if bound <= 0:
        return TRUE
    if bound > len(items):
        return FALSE
    return CountGe(items, bound)


def formula_vars(f: Formula) -> set[int]:
    """Indices of the variables a formula mentions."""
    out: set[int] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Cmp):
            if isinstance(node.a, IntVar):
                out.add(node.a.index)
            if isinstance(node.b, IntVar):
                out.add(node.b.index)
        elif isinstance(node, (And, Or)):
            stack.extend(node.items)
        elif isinstance(node, Not):
            stack.append(node.item)
        elif isinstance(node, CountGe):
            stack.extend(node.items)
    return out


def _compile(f: Formula):
    """Compile a formula to a closure over the assignment vector.

    The closure returns True, False, or None (undetermined under the
    current partial assignment).
    """
    if isinstance(f, Lit):
        v = f.value
        return lambda values: v
    if isinstance(f, Cmp):
        op = _OPS[f.op]
        a, b = f.a, f.b
        if isinstance(a, IntVar) and isinstance(b, IntVar):
            ia, ib = a.index, b.index

            def ev(values, ia=ia, ib=ib, op=op):
                va = values[ia]
                if va is None:
                    return None
                vb = values[ib]
                if vb is None:
                    return None
                return op(va, vb)

            return ev
        if isinstance(a, IntVar):
            ia, kb = a.index, b

            def ev(values, ia=ia, kb=kb, op=op):
                va = values[ia]
                if va is None:
                    return None
                return op(va, kb)

            return ev
        ka, ib = a, b.index

        def ev(values, ka=ka, ib=ib, op=op):
            vb = values[ib]
            if vb is None:
                return None
            return op(ka, vb)

        return ev
    if isinstance(f, And):
        subs = [_compile(s) for s in f.items]

        def ev(values, subs=subs):
            unknown = False
            for s in subs:
                r = s(values)
                if r is False:
                    return False
                if r is None:
                    unknown = True
            return None if unknown else True

        return ev
    if isinstance(f, Or):
        subs = [_compile(s) for s in f.items]

        def ev(values, subs=subs):
            unknown = False
            for s in subs:
                r = s(values)
                if r is True:
                    return True
                if r is None:
                    unknown = True
            return None if unknown else False

        return ev
    if isinstance(f, Not):
        sub = _compile(f.item)

        def ev(values, sub=sub):
            r = sub(values)
            return None if r is None else not r

        return ev
    if isinstance(f, CountGe):
        subs = [_compile(s) for s in f.items]
        bound = f.bound

        def ev(values, subs=subs, bound=bound, total=len(subs)):
            true = 0
            unknown = 0
            for s in subs:
                r = s(values)
                if r is True:
                    true += 1
                elif r is None:
                    unknown += 1
            if true >= bound:
                return True
            if true + unknown < bound:
                return False
            return None

        return ev
    raise TypeError(f"unknown formula node {f!r}")


# --------------------------------------------------------------------------
# Backends
# --------------------------------------------------------------------------

class SolverBackend:
    """Shared bookkeeping: variable declarations and constraint frames."""

    def __init__(self):
        self.variables: list[IntVar] = []
        self._frames: list[list[Formula]] = [[]]
        self._model: dict[str, int] | None = None

    def new_int(self, name: str, lo: int, hi: int, prefer: int | None = None) -> IntVar:
        var = IntVar(name, lo, hi, len(self.variables), prefer)
        self.variables.append(var)
        return var

    def new_bool(self, name: str, prefer: int | None = None) -> IntVar:
        return self.new_int(name, 0, 1, prefer)

    def add(self, formula: Formula) -> None:
        # Splitting conjunctions improves pruning granularity.
        if isinstance(formula, And):
            for item in formula.items:
                self.add(item)
            return
        if isinstance(formula, Lit) and formula.value:
            return
        self._frames[-1].append(formula)

    def push(self) -> None:
        self._frames.append([])

    def pop(self) -> None:
        if len(self._frames) == 1:
            raise IndexError("pop without matching push")
        self._frames.pop()

    def constraints(self) -> list[Formula]:
        return [f for frame in self._frames for f in frame]

    def model(self) -> dict[str, int]:
        if self._model is None:
            raise RuntimeError("no model available; last check was not sat")
        return self._model

    def check(self, deadline: Deadline | None = None,
              node_budget: int | None = None) -> bool | None:
        """True/False, or None when an explicit node budget ran out."""
        raise NotImplementedError


class ExhaustiveBackend(SolverBackend):
    """Full cartesian-product enumeration.  Oracle-grade, tiny inputs only.

    Node budgets are ignored: answers are always definitive.
    """

    def check(self, deadline: Deadline | None = None,
              node_budget: int | None = None) -> bool:
        self._model = None
        evaluators = [_compile(f) for f in self.constraints()]
        n = len(self.variables)
        values: list[int | None] = [None] * n
        lows = [v.lo for v in self.variables]
        highs = [v.hi for v in self.variables]

        ticks = 0

        def enumerate_from(i: int) -> bool:
            nonlocal ticks
            if i == n:
                return all(ev(values) for ev in evaluators)
            for val in range(lows[i], highs[i] + 1):
                ticks += 1
                if deadline is not None and ticks % 4096 == 0:
                    deadline.check()
                values[i] = val
                if enumerate_from(i + 1):
                    return True
            values[i] = None
            return False

        if enumerate_from(0):
            self._model = {v.name: values[v.index] for v in self.variables}
            return True
        return False


class BacktrackingBackend(SolverBackend):
    """Depth-first search with forward checking and unit propagation.

    Constraints are re-checked whenever one of their variables is bound
    and prune the branch as soon as they are definitely false.  Definite
    results are final under extension (evaluation is monotone), so
    constraints that become true are parked on a trail and skipped until
    backtracking.  When a still-open constraint is down to one unbound
    variable, that variable's domain is filtered immediately; an emptied
    domain fails the branch long before the search would reach it, and a
    domain squeezed to one value is bound next.

    Search runs under a geometric restart schedule: if no answer falls
    inside the round's node allowance, value orders are reshuffled
    (deterministically from the restart index, keeping each variable's
    preferred value first) and the allowance quadruples.  The final round
    is unbounded, so completeness is preserved.  With an explicit
    ``node_budget`` the search instead runs one bounded round and returns
    None when it runs out -- callers use this for optional probes where
    giving up is acceptable.
    """

    RESTART_NODES = 3000

    def check(self, deadline: Deadline | None = None,
              node_budget: int | None = None) -> bool | None:
        self._model = None
        n = len(self.variables)

        compiled: list = []
        base_values: list[int | None] = [None] * n
        for f in self.constraints():
            ev = _compile(f)
            touched = tuple(formula_vars(f))
            if not touched:
                if ev(base_values) is False:
                    return False
                continue
            compiled.append((ev, touched))

        if node_budget is not None:
            return self._search(compiled, self._value_orders(0), deadline, node_budget)

        allowance = self.RESTART_NODES
        restart = 0
        while True:
            orders = self._value_orders(restart)
            result = self._search(compiled, orders, deadline,
                                  allowance if restart < 6 else None)
            if result is not None:
                return result
            restart += 1
            allowance *= 4

    def _value_orders(self, restart: int) -> list[tuple[int, ...]]:
        if restart == 0:
            return [v.value_order() for v in self.variables]
        rng = random.Random(restart)
        orders = []
        for v in self.variables:
            values = list(range(v.lo, v.hi + 1))
            rng.shuffle(values)
            if v.prefer is not None and v.lo <= v.prefer <= v.hi:
                values.remove(v.prefer)
                values.insert(0, v.prefer)
            orders.append(tuple(values))
        return orders

    def _search(self, compiled, orders, deadline: Deadline | None,
                node_budget: int | None):
        """One restart round; returns True/False, or None on budget out."""
        n = len(self.variables)
        values: list[int | None] = [None] * n

        buckets: list[list] = [[] for _ in range(n)]
        for num, (ev, touched) in enumerate(compiled):
            entry = (num, ev, touched)
            for idx in touched:
                buckets[idx].append(entry)
        settled = bytearray(len(compiled))

        # Live domains as flag arrays (offset by lo), pruned in place.
        lows = [v.lo for v in self.variables]
        alive = [bytearray([1]) * (v.hi - v.lo + 1) for v in self.variables]
        live = [len(d) for d in alive]
        ticks = 0

        def propagate(i: int, settled_trail: list, domain_trail: list) -> bool:
            """Re-check every open constraint touching variable ``i``."""
            for cid, ev, touched in buckets[i]:
                if settled[cid]:
                    continue
                r = ev(values)
                if r is False:
                    return False
                if r is True:
                    settled[cid] = 1
                    settled_trail.append(cid)
                    continue
                free = -1
                for u in touched:
                    if values[u] is None:
                        if free >= 0:
                            free = -2
                            break
                        free = u
                if free < 0:
                    continue
                # Exactly one unbound variable: filter its domain.
                dom = alive[free]
                lo = lows[free]
                for off in range(len(dom)):
                    if not dom[off]:
                        continue
                    values[free] = lo + off
                    if ev(values) is False:
                        dom[off] = 0
                        live[free] -= 1
                        domain_trail.append((free, off))
                values[free] = None
                if not live[free]:
                    return False
            return True

        def pick() -> int:
            # Forced variables first (unit propagation); otherwise follow
            # declaration order, which encoders arrange so that tightly
            # coupled variables sit next to each other.
            best = -1
            for i in range(n):
                if values[i] is None:
                    if live[i] <= 1:
                        return i
                    if best < 0:
                        best = i
            return best

        class _BudgetOut(Exception):
            pass

        def search(depth: int) -> bool:
            nonlocal ticks
            if depth == n:
                return True
            i = pick()
            dom = alive[i]
            lo = lows[i]
            for val in orders[i]:
                if not dom[val - lo]:
                    continue
                ticks += 1
                if ticks % 512 == 0:
                    if deadline is not None:
                        deadline.check()
                    if node_budget is not None and ticks > node_budget:
                        raise _BudgetOut
                values[i] = val
                settled_trail: list = []
                domain_trail: list = []
                if propagate(i, settled_trail, domain_trail) and search(depth + 1):
                    return True
                for cid in settled_trail:
                    settled[cid] = 0
                for var, off in domain_trail:
                    alive[var][off] = 1
                    live[var] += 1
            values[i] = None
            return False

        try:
            if search(0):
                self._model = {v.name: values[v.index] for v in self.variables}
                return True
            return False
        except _BudgetOut:
            return None


DEFAULT_BACKEND = BacktrackingBackend
