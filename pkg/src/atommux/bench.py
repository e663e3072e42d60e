"""Experiment drivers: pairwise, grouped, and multi-array workloads.

Each compilation task (one circuit on one array, one baseline solve)
gets the configured time limit; tasks that run out are recorded as
``timeout`` rows and the run carries on, so no row is ever silently
missing.  Identical solo compiles are cached within a run: a circuit's
standalone schedule does not depend on the workload it appears in.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .arraystate import GridSpec
from .baselines import BaselineTimeoutError, compile_merged, delta_stage_accounting
from .circuits import Circuit, JSON_FORMAT, QASM_FORMAT, layer_dag, parse_circuit
from .compiler import (
    CompileOutcome,
    CompileTimeoutError,
    GridTooSmallError,
    compile_each,
    solve_window,
)
from .metrics import (
    GROUPED_COLUMNS,
    MERGED,
    MULTI_COLUMNS,
    PAIRWISE_COLUMNS,
    SEQUENTIAL,
    MetricRow,
    UndefinedMetricError,
    rpr,
    speedup,
    write_csv,
)
from .placement import PlacementRequest, UnplaceableCircuitError, schedule_all
from .validator import stage_count


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    mode: str
    circuits: str
    num_arrays: int = 1
    capacity: int = 8
    grid: GridSpec = field(default_factory=lambda: GridSpec(8, 8))
    time_limit_seconds: float = 10000.0
    window: int = 2
    strict_exclusivity: bool = True
    jobs: int = 1
    seed: int = 0
    out: str | None = None
    deterministic: bool = False

    def __post_init__(self):
        if self.mode not in ("pairwise", "grouped", "multi"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.num_arrays < 1:
            raise ConfigError("arrays must be >= 1")
        if self.mode == "multi" and self.num_arrays < 2:
            raise ConfigError("multi mode needs at least 2 arrays")
        if self.time_limit_seconds <= 0:
            raise ConfigError("time limit must be positive")
        if self.capacity < 1:
            raise ConfigError("wmax must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


@dataclass
class BenchReport:
    mode: str
    columns: tuple[str, ...]
    rows: list[dict]
    metric_rows: list[MetricRow] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.get("status") not in ("ok", "", None))

    @property
    def exit_code(self) -> int:
        return 2 if self.failures else 0

    def write(self, path: str) -> None:
        write_csv(path, self.columns, self.rows)


def parse_grid(spec: str) -> GridSpec:
    """Parse ``XxY[:RxC]`` into a grid with optional explicit line counts."""
    m = re.fullmatch(r"(\d+)x(\d+)(?::(\d+)x(\d+))?", spec.strip())
    if m is None:
        raise ConfigError(f"bad grid spec {spec!r}; expected XxY or XxY:RxC")
    x, y = int(m.group(1)), int(m.group(2))
    rows = int(m.group(3)) if m.group(3) else 0
    cols = int(m.group(4)) if m.group(4) else 0
    return GridSpec(x, y, aod_rows=rows, aod_cols=cols)


def load_circuits(path: str) -> list[Circuit]:
    """Load every ``.qasm``/``.json`` circuit under a directory (or one file),
    sorted by filename so input order is reproducible."""
    p = Path(path)
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.suffix in (".qasm", ".json"))
    elif p.exists():
        files = [p]
    else:
        raise ConfigError(f"circuit path {path!r} does not exist")
    if not files:
        raise ConfigError(f"no .qasm or .json circuits under {path!r}")
    circuits = []
    for f in files:
        fmt = QASM_FORMAT if f.suffix == ".qasm" else JSON_FORMAT
        circuits.append(parse_circuit(f.read_text(), fmt, name=f.stem))
    return circuits


@dataclass
class _TaskResult:
    status: str
    stages: int | None
    seconds: float


class _SoloCache:
    """Memoized standalone compiles, shared across workload rows."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self._cache: dict[str, _TaskResult] = {}

    def get(self, circuit: Circuit) -> _TaskResult:
        if circuit.name not in self._cache:
            cfg = self.cfg
            try:
                sched = solve_window(
                    circuit, cfg.grid, None, cfg.time_limit_seconds,
                    window=cfg.window, strict_exclusivity=cfg.strict_exclusivity,
                )
                result = _TaskResult("ok", sched.num_stages, sched.solve_seconds)
            except CompileTimeoutError:
                result = _TaskResult("timeout", None, cfg.time_limit_seconds)
            except GridTooSmallError:
                result = _TaskResult("grid-too-small", None, 0.0)
            self._cache[circuit.name] = result
        return self._cache[circuit.name]


def _refined_single_array_order(circuits: list[Circuit], cfg: ExperimentConfig) -> list[Circuit]:
    layered = tuple(layer_dag(c) for c in circuits)
    placement = schedule_all(PlacementRequest(layered, 1, cfg.capacity))
    return [circuits[i] for i in placement.array_orders[0]]


def _time(cfg: ExperimentConfig, seconds: float | None) -> float:
    if seconds is None:
        return 0.0
    return 0.0 if cfg.deterministic else seconds


def run_pairwise(cfg: ExperimentConfig) -> BenchReport:
    """Every unordered pair compiled jointly and against both baselines."""
    circuits = load_circuits(cfg.circuits)
    if len(circuits) < 2:
        raise ConfigError("pairwise mode needs at least two circuits")
    depth = {c.name: layer_dag(c).length for c in circuits}
    solo = _SoloCache(cfg)
    rows: list[dict] = []
    metric_rows: list[MetricRow] = []

    for i in range(len(circuits)):
        for j in range(i + 1, len(circuits)):
            a, b = circuits[i], circuits[j]
            c_map, c_space = (a, b) if depth[a.name] >= depth[b.name] else (b, a)
            workload = f"{c_map.name}+{c_space.name}"
            row = {
                "C_map": c_map.name, "C_space": c_space.name,
                "Depth_map": depth[c_map.name], "Depth_space": depth[c_space.name],
                "status": "ok",
            }

            ordered = _refined_single_array_order([a, b], cfg)
            outcomes, occ = compile_each(
                ordered, cfg.grid, None, cfg.time_limit_seconds,
                window=cfg.window, strict_exclusivity=cfg.strict_exclusivity,
            )
            if all(o.ok for o in outcomes):
                l_dyn: int | None = stage_count(occ)
                t_dyn: float | None = sum(o.seconds for o in outcomes)
            else:
                l_dyn, t_dyn = None, None
                row["status"] = next(o.status for o in outcomes if not o.ok)

            seq = [solo.get(a), solo.get(b)]
            if all(r.status == "ok" for r in seq):
                l_seq: int | None = sum(r.stages for r in seq)
                t_seq: float | None = sum(r.seconds for r in seq)
            else:
                l_seq, t_seq = None, None
                if row["status"] == "ok":
                    row["status"] = next(r.status for r in seq if r.status != "ok")

            try:
                _, l_mrg, t_mrg = compile_merged(
                    [a, b], cfg.grid, cfg.time_limit_seconds,
                    window=cfg.window, strict_exclusivity=cfg.strict_exclusivity,
                )
            except BaselineTimeoutError:
                l_mrg, t_mrg = None, None
                if row["status"] == "ok":
                    row["status"] = "timeout"
            except GridTooSmallError:
                l_mrg, t_mrg = None, None
                if row["status"] == "ok":
                    row["status"] = "grid-too-small"

            row.update({
                "T_DYNAMO": _time(cfg, t_dyn) if t_dyn is not None else None,
                "T_DPQA_s": _time(cfg, t_seq) if t_seq is not None else None,
                "T_DPQA_c": _time(cfg, t_mrg) if t_mrg is not None else None,
                "L_DYNAMO": l_dyn, "L_DPQA_s": l_seq, "L_DPQA_c": l_mrg,
            })
            for kind, l_base, t_base, rpr_col, spd_col in (
                (SEQUENTIAL, l_seq, t_seq, "RPR_s", "Speedup_s"),
                (MERGED, l_mrg, t_mrg, "RPR_c", "Speedup_c"),
            ):
                if l_dyn is not None and l_base is not None:
                    try:
                        mrow = MetricRow.build(workload, kind, l_dyn, l_base, t_dyn, t_base)
                        metric_rows.append(mrow)
                        row[rpr_col] = mrow.rpr
                        row[spd_col] = 0.0 if cfg.deterministic else mrow.speedup
                    except UndefinedMetricError:
                        pass
            rows.append(row)
    return BenchReport("pairwise", PAIRWISE_COLUMNS, rows, metric_rows)


def _grouped_rows(
    cfg: ExperimentConfig,
    ordered: list[Circuit],
    outcomes: list[CompileOutcome],
    solo: _SoloCache,
    depth: dict[str, int],
) -> list[dict]:
    deltas = delta_stage_accounting(
        [o.joint_stages for o in outcomes], [o.seconds for o in outcomes]
    )
    rows = []
    sums = {"dL_DYNAMO": 0, "dL_DPQA_s": 0, "dT_DYNAMO": 0.0, "dT_DPQA_s": 0.0}
    for circuit, outcome, (d_l, d_t) in zip(ordered, outcomes, deltas):
        base = solo.get(circuit)
        row = {
            "circuit": circuit.name,
            "depth": depth[circuit.name],
            "status": outcome.status if outcome.status != "ok" else base.status,
            "dL_DYNAMO": d_l if outcome.ok else None,
            "dT_DYNAMO": _time(cfg, d_t) if outcome.ok else None,
            "dL_DPQA_s": base.stages,
            "dT_DPQA_s": _time(cfg, base.seconds) if base.status == "ok" else None,
        }
        if outcome.ok and base.status == "ok":
            sums["dL_DYNAMO"] += d_l
            sums["dL_DPQA_s"] += base.stages
            sums["dT_DYNAMO"] += d_t
            sums["dT_DPQA_s"] += base.seconds
            try:
                row["RPR_s"] = rpr(d_l, base.stages)
            except UndefinedMetricError:
                pass
            try:
                row["Speedup_s"] = 0.0 if cfg.deterministic else speedup(d_t, base.seconds)
            except UndefinedMetricError:
                pass
        rows.append(row)
    total = {
        "circuit": "Sum",
        "depth": sum(depth[c.name] for c in ordered),
        "dL_DYNAMO": sums["dL_DYNAMO"],
        "dL_DPQA_s": sums["dL_DPQA_s"],
        "dT_DYNAMO": _time(cfg, sums["dT_DYNAMO"]),
        "dT_DPQA_s": _time(cfg, sums["dT_DPQA_s"]),
        "status": "ok" if all(r["status"] == "ok" for r in rows) else "partial",
    }
    if sums["dL_DPQA_s"]:
        total["RPR_s"] = rpr(sums["dL_DYNAMO"], sums["dL_DPQA_s"])
    if sums["dT_DYNAMO"] and not cfg.deterministic:
        total["Speedup_s"] = speedup(sums["dT_DYNAMO"], sums["dT_DPQA_s"])
    elif cfg.deterministic:
        total["Speedup_s"] = 0.0
    rows.append(total)
    return rows


def run_grouped(cfg: ExperimentConfig) -> BenchReport:
    """The whole group multi-programmed onto one array, in refined order."""
    circuits = load_circuits(cfg.circuits)
    depth = {c.name: layer_dag(c).length for c in circuits}
    ordered = _refined_single_array_order(circuits, cfg)
    outcomes, _ = compile_each(
        ordered, cfg.grid, None, cfg.time_limit_seconds,
        window=cfg.window, strict_exclusivity=cfg.strict_exclusivity,
    )
    solo = _SoloCache(cfg)
    rows = _grouped_rows(cfg, ordered, outcomes, solo, depth)
    return BenchReport("grouped", GROUPED_COLUMNS, rows)


def run_multiresource(cfg: ExperimentConfig) -> BenchReport:
    """Placement over N arrays, then per-array multi-program compiles."""
    circuits = load_circuits(cfg.circuits)
    depth = {c.name: layer_dag(c).length for c in circuits}
    layered = tuple(layer_dag(c) for c in circuits)
    placement = schedule_all(PlacementRequest(layered, cfg.num_arrays, cfg.capacity))

    per_array = [[circuits[i] for i in order] for order in placement.array_orders]

    def compile_array(ordered: list[Circuit]):
        return compile_each(
            ordered, cfg.grid, None, cfg.time_limit_seconds,
            window=cfg.window, strict_exclusivity=cfg.strict_exclusivity,
        )

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(compile_array, per_array))
    else:
        results = [compile_array(ordered) for ordered in per_array]

    rows: list[dict] = []
    for qpu, (ordered, (outcomes, _)) in enumerate(zip(per_array, results)):
        deltas = delta_stage_accounting(
            [o.joint_stages for o in outcomes], [o.seconds for o in outcomes]
        )
        sum_l, sum_t = 0, 0.0
        for circuit, outcome, (d_l, d_t) in zip(ordered, outcomes, deltas):
            rows.append({
                "qpu": qpu,
                "circuit": circuit.name,
                "depth": depth[circuit.name],
                "dL_DYNAMO": d_l if outcome.ok else None,
                "dT_DYNAMO": _time(cfg, d_t) if outcome.ok else None,
                "status": outcome.status,
            })
            if outcome.ok:
                sum_l += d_l
                sum_t += d_t
        rows.append({
            "qpu": qpu, "circuit": "Sum", "depth": "",
            "dL_DYNAMO": sum_l, "dT_DYNAMO": _time(cfg, sum_t),
            "status": "ok" if all(o.ok for o in outcomes) else "partial",
        })
    return BenchReport("multi", MULTI_COLUMNS, rows)


def run(cfg: ExperimentConfig) -> BenchReport:
    try:
        if cfg.mode == "pairwise":
            report = run_pairwise(cfg)
        elif cfg.mode == "grouped":
            report = run_grouped(cfg)
        else:
            report = run_multiresource(cfg)
    except UnplaceableCircuitError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.out:
        report.write(cfg.out)
    return report


# --------------------------------------------------------------------------
# Config files: JSON or a flat TOML subset (key = value lines).
# --------------------------------------------------------------------------

_TOML_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+?)\s*$")


def _toml_value(raw: str):
    if raw.startswith('"') and raw.endswith('"'):
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"cannot parse config value {raw!r}")


def load_config_file(path: str) -> dict:
    text = Path(path).read_text()
    if path.endswith(".json"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return data
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _TOML_LINE.match(line)
        if m is None:
            raise ConfigError(f"{path}:{lineno}: cannot parse config line {raw!r}")
        values[m.group(1)] = _toml_value(m.group(2))
    return values
