"""Circuit model: two-qubit gate lists and their DAG-layered 2-D shape.

Circuits are parsed from a small OpenQASM 2 subset or a JSON gate list.
Only two-qubit entangling gates (``cx``/``cz``) are kept: single-qubit
gates never influence stage counts in this execution model, so they are
stripped at parse time.  Gates on three or more qubits are rejected.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

QASM_FORMAT = "qasm-subset"
JSON_FORMAT = "json-gatelist"

# Statements that are structural rather than gate applications.
_STRUCTURAL = ("OPENQASM", "include", "creg", "barrier", "measure", "reset")


class CircuitError(ValueError):
    """Invalid circuit structure (bad qubit indices, duplicate gate ids...)."""


class ParseError(CircuitError):
    """Malformed circuit text; carries the statement position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(message + where)


@dataclass(frozen=True)
class Gate:
    """A two-qubit interaction on an ordered operand pair."""

    id: int
    qubits: tuple[int, int]
    label: str = "cz"

    def __post_init__(self):
        if self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"gate {self.id} acts twice on qubit {self.qubits[0]}")


@dataclass(frozen=True)
class Circuit:
    name: str
    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        ids = [g.id for g in self.gates]
        if ids != list(range(len(self.gates))):
            raise CircuitError(f"circuit {self.name!r}: gate ids not dense 0..{len(ids) - 1}")
        for g in self.gates:
            if not all(0 <= q < self.num_qubits for q in g.qubits):
                raise CircuitError(
                    f"circuit {self.name!r}: gate {g.id} references qubit outside "
                    f"0..{self.num_qubits - 1}"
                )

    @property
    def num_gates(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class LayeredCircuit:
    """A circuit plus its ASAP layering: length is the layer count and the
    width profile gives the gate count of each layer."""

    circuit: Circuit
    layers: tuple[frozenset[int], ...]
    width_profile: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "width_profile", tuple(len(l) for l in self.layers))

    @property
    def name(self) -> str:
        return self.circuit.name

    @property
    def length(self) -> int:
        return len(self.layers)

    @property
    def max_width(self) -> int:
        return max(self.width_profile, default=0)


def parse_circuit(text: bytes | str, format: str = QASM_FORMAT, name: str = "circuit") -> Circuit:
    """Parse circuit text in the declared format into a ``Circuit``.

    Single-qubit gates are dropped (with a warning); gates on more than two
    qubits raise ``ParseError``.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if format == QASM_FORMAT:
        return _parse_qasm(text, name)
    if format == JSON_FORMAT:
        return _parse_json_gatelist(text, name)
    raise ValueError(f"unknown circuit format {format!r}")


_QREG_RE = re.compile(r"^qreg\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")
_OPERAND_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")
_GATE_STMT_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(\([^)]*\))?\s*(.*)$")


def _parse_qasm(text: str, name: str) -> Circuit:
    reg_name: str | None = None
    reg_size = 0
    gates: list[Gate] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            col = raw.index(stmt.split()[0]) + 1 if stmt.split()[0] in raw else None

            m = _QREG_RE.match(stmt)
            if m:
                if reg_name is not None:
                    raise ParseError("multiple qreg declarations are unsupported", lineno, col)
                reg_name, reg_size = m.group(1), int(m.group(2))
                continue
            if stmt.startswith(_STRUCTURAL) or "->" in stmt:
                continue

            m = _GATE_STMT_RE.match(stmt)
            if m is None:
                raise ParseError(f"unparseable statement {stmt!r}", lineno, col)
            gate_name, _params, operand_str = m.group(1), m.group(2), m.group(3)
            if not operand_str:
                raise ParseError(f"statement {stmt!r} has no operands", lineno, col)
            operands = [_resolve_operand(op.strip(), reg_name, reg_size, lineno, col)
                        for op in operand_str.split(",")]
            if len(operands) > 2:
                raise ParseError(
                    f"gate {gate_name!r} acts on {len(operands)} qubits; "
                    "only 1- and 2-qubit gates are supported", lineno, col,
                )
            if gate_name.lower() in ("cx", "cz"):
                if len(operands) != 2:
                    raise ParseError(f"{gate_name!r} needs two operands", lineno, col)
                if operands[0] == operands[1]:
                    raise ParseError(f"{gate_name!r} operands must differ", lineno, col)
                gates.append(Gate(len(gates), (operands[0], operands[1]), gate_name.lower()))
            else:
                log.warning("%s:%d: ignoring non-entangling statement %r", name, lineno, stmt)

    if reg_name is None:
        raise ParseError("no qreg declaration found")
    return Circuit(name, reg_size, tuple(gates))


def _resolve_operand(op: str, reg_name: str | None, reg_size: int,
                     lineno: int, col: int | None) -> int:
    m = _OPERAND_RE.match(op)
    if m is None:
        raise ParseError(f"malformed operand {op!r}", lineno, col)
    reg, idx = m.group(1), int(m.group(2))
    if reg_name is None or reg != reg_name:
        raise ParseError(f"reference to undeclared register {reg!r}", lineno, col)
    if idx >= reg_size:
        raise ParseError(f"qubit {reg}[{idx}] outside register of size {reg_size}", lineno, col)
    return idx


def _parse_json_gatelist(text: str, name: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    try:
        num_qubits = int(data["num_qubits"])
        raw_gates = data["gates"]
    except KeyError as exc:
        raise ParseError(f"missing required key {exc.args[0]!r}") from exc
    circuit_name = str(data.get("name", name))

    gates = []
    for i, pair in enumerate(raw_gates):
        if len(pair) != 2:
            raise ParseError(f"gate {i} must list exactly two qubits, got {pair!r}")
        q0, q1 = int(pair[0]), int(pair[1])
        if not (0 <= q0 < num_qubits and 0 <= q1 < num_qubits):
            raise ParseError(f"gate {i} references qubit outside 0..{num_qubits - 1}")
        gates.append(Gate(i, (q0, q1)))
    return Circuit(circuit_name, num_qubits, tuple(gates))


def layer_dag(circuit: Circuit) -> LayeredCircuit:
    """Greedy ASAP layering: each gate lands one layer after the deepest
    earlier gate sharing a qubit with it (layer 0 if none)."""
    qubit_depth = [0] * circuit.num_qubits
    layers: list[set[int]] = []
    for gate in circuit.gates:
        q0, q1 = gate.qubits
        layer = max(qubit_depth[q0], qubit_depth[q1])
        if layer == len(layers):
            layers.append(set())
        layers[layer].add(gate.id)
        qubit_depth[q0] = qubit_depth[q1] = layer + 1
    return LayeredCircuit(circuit, tuple(frozenset(l) for l in layers))


def shape(lc: LayeredCircuit) -> tuple[int, tuple[int, ...]]:
    """Project a layered circuit to its (length, width profile) shape."""
    return lc.length, lc.width_profile


def merge_circuits(circuits: list[Circuit], name: str | None = None) -> Circuit:
    """Concatenate circuits into one, keeping their qubit spaces disjoint.

    Circuit ``m``'s qubit indices are offset by the total qubit count of
    circuits ``0..m-1``; gate order is preserved within each circuit and
    circuits are appended in input order.
    """
    if not circuits:
        raise ValueError("merge_circuits needs at least one circuit")
    merged_name = name or "+".join(c.name for c in circuits)
    gates: list[Gate] = []
    offset = 0
    for c in circuits:
        for g in c.gates:
            gates.append(Gate(len(gates), (g.qubits[0] + offset, g.qubits[1] + offset), g.label))
        offset += c.num_qubits
    return Circuit(merged_name, offset, tuple(gates))
