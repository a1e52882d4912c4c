"""Energy-vs-database-size sweeps for Grover search on the QPU node against the
brute-force CPU baseline, written as deterministic CSV."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .baseline import CpuModel, cpu_search_energy, load_cpu_model
from .grover import (
    SearchInstance,
    generate_grover,
    grover_physical_capacity,
    grover_physical_counts,
    logical_gate_count,
    lower_to_physical,
)
from .isa import MicrocodeTable, load_gate_models
from .qec import (
    BLOCK,
    MATERIALIZE_DATA_QUBITS,
    GateClassTally,
    QecConfig,
    load_qec_config,
    lower_qec,
    physical_qubits,
)
from .sim import tally_stats

COLUMNS = (
    "n",
    "N",
    "qec_levels",
    "logical_gates",
    "physical_gates",
    "physical_qubits",
    "total_time_ns",
    "qpu_energy_zJ",
    "cpu_energy_nomem_zJ",
    "cpu_energy_mem_zJ",
)
MATERIALIZE_LIMIT = 10**6


@dataclass(frozen=True)
class SweepSpec:
    n_min: int
    n_max: int
    levels: tuple[int, ...] = (0, 1, 2)
    gate_models: str | Path | None = None
    cpu_model: str | Path | None = None
    qec: str | Path | None = None
    out: str | Path | None = None
    marked: int = 0
    materialize_limit: int = MATERIALIZE_LIMIT
    jobs: int = 1

    def __post_init__(self):
        if self.n_min < 2:
            raise ValueError(f"n_min must be >= 2, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ValueError("n_max must be >= n_min")
        if any(L < 0 for L in self.levels):
            raise ValueError("QEC levels must be nonnegative")


@lru_cache(maxsize=8)
def _physical_grover(n: int, marked: int, limit: int):
    """(per-opcode counts, materialized program or None) for the L=0 program."""
    inst = SearchInstance(n, marked % (1 << n))
    counts = grover_physical_counts(inst)
    if sum(counts.values()) > limit:
        return counts, None
    program = lower_to_physical(generate_grover(inst))
    built = Counter(instr.opcode for instr in program.instructions)
    if built != counts:
        raise RuntimeError(f"closed-form counts disagree with generated program at n={n}")
    return counts, program


def sweep_row(n: int, level: int, microcode: MicrocodeTable, cpu: CpuModel,
              qec: QecConfig, marked: int = 0, materialize_limit: int = MATERIALIZE_LIMIT) -> dict:
    inst = SearchInstance(n, marked % (1 << n))
    counts, program = _physical_grover(n, marked, materialize_limit)
    config = qec.with_levels(level)

    result = lower_qec(GateClassTally(counts), config)
    if (program is not None and level > 0
            and program.capacity * BLOCK**level <= MATERIALIZE_DATA_QUBITS):
        small = lower_qec(program, config, materialize_limit)
        if small.program is not None and GateClassTally.of_program(small.program) != result.tally:
            raise RuntimeError(f"materialized QEC expansion disagrees with counts at n={n}, L={level}")
    stats = tally_stats(result.tally.by_opcode, microcode)

    qubits = physical_qubits(grover_physical_capacity(inst), config)
    N = inst.N
    return {
        "n": n,
        "N": N,
        "qec_levels": level,
        "logical_gates": logical_gate_count(inst),
        "physical_gates": result.tally.total,
        "physical_qubits": qubits.total,
        "total_time_ns": stats.total_time_ns,
        "qpu_energy_zJ": stats.total_energy_zJ,
        "cpu_energy_nomem_zJ": cpu_search_energy(N, cpu.without_memory()),
        "cpu_energy_mem_zJ": cpu_search_energy(N, cpu),
    }


def _row_task(args):
    return sweep_row(*args)


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Compute all (n, level) rows in ascending order; writes CSV if ``spec.out`` is set."""
    microcode = load_gate_models(spec.gate_models)
    cpu = load_cpu_model(spec.cpu_model)
    qec = load_qec_config(spec.qec)
    tasks = [
        (n, level, microcode, cpu, qec, spec.marked, spec.materialize_limit)
        for n in range(spec.n_min, spec.n_max + 1)
        for level in sorted(set(spec.levels))
    ]
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            rows = list(pool.map(_row_task, tasks))
    else:
        rows = [_row_task(t) for t in tasks]
    if spec.out is not None:
        write_csv(rows, spec.out)
    return rows


def format_csv(rows: Iterable[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in COLUMNS})
    return buf.getvalue()


def write_csv(rows: Iterable[Mapping], path: str | Path) -> None:
    Path(path).write_text(format_csv(rows))


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: int(v) for k, v in row.items()} for row in csv.DictReader(fh)]


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    residual: float  # RMS residual in log2 units


def fit_scaling(rows: Sequence[Mapping], column: str, x: str = "n") -> ScalingFit:
    """Least-squares line through (x, log2(column))."""
    if len(rows) < 4:
        raise ValueError("need at least 4 rows to fit")
    xs = np.array([float(r[x]) for r in rows])
    vals = [r[column] for r in rows]
    if any(v <= 0 for v in vals):
        raise ValueError(f"{column} has nonpositive values")
    if np.ptp(xs) == 0:
        raise ValueError("degenerate data: all x values equal")
    ys = np.array([math.log2(v) for v in vals])
    A = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - (slope * xs + intercept)
    return ScalingFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))
