"""Discrete-event model of a single QPU-accelerated node.

The host streams instructions to the QCU, which decodes each into an opcode
and issues it to the QEU owning that opcode. The schedule is serial: the host
dispatches instruction i+1 only once instruction i has completed. QEUs do not
emit fields here; each gate just advances the clock by its duration and adds
its energy.

Event flow per instruction (lambda = dispatch latency per hop)::

    DISPATCH(t) -> OPCODE_ISSUE(t+lambda) -> GATE_START(t+2*lambda)
        -> [READOUT_RETURN] -> GATE_COMPLETE(start+duration)
"""

from __future__ import annotations

import enum
import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple

from .isa import GateClass, Level, MicrocodeTable, Opcode, Program, validate_program

HOPS = 2  # host -> QCU, QCU -> QEU


class EventKind(enum.IntEnum):
    DISPATCH = 0
    OPCODE_ISSUE = 1
    GATE_START = 2
    GATE_COMPLETE = 3
    READOUT_RETURN = 4


class Event(NamedTuple):
    timestamp: int
    sequence: int
    kind: EventKind
    index: int

    def format(self) -> str:
        return f"{self.timestamp} {self.sequence} {self.kind.name} {self.index}"


def _default_assignment() -> dict[Opcode, int]:
    order = {GateClass.INIT: 0, GateClass.UNITARY: 1, GateClass.READ: 2}
    return {op: order[op.gate_class] for op in Opcode if op.is_physical}


@dataclass(frozen=True)
class NodeTopology:
    qeu_count: int = 3
    assignment: Mapping[Opcode, int] = field(default_factory=_default_assignment)
    dispatch_latency_ns: int = 0

    def __post_init__(self):
        if self.qeu_count < 1:
            raise ValueError("need at least one QEU")
        if self.dispatch_latency_ns < 0:
            raise ValueError("dispatch latency must be nonnegative")
        for op in Opcode:
            if op.is_physical and op not in self.assignment:
                raise ValueError(f"{op} is not assigned to a QEU")
        for op, qeu in self.assignment.items():
            if not 0 <= qeu < self.qeu_count:
                raise ValueError(f"{op} assigned to missing QEU {qeu}")


@dataclass(frozen=True)
class SimStats:
    opcode_counts: Mapping[str, int]
    class_counts: Mapping[str, int]
    total_time_ns: int
    total_energy_zJ: int
    event_count: int

    def as_dict(self) -> dict:
        return {
            "opcode_counts": dict(self.opcode_counts),
            "class_counts": dict(self.class_counts),
            "total_time_ns": self.total_time_ns,
            "total_energy_zJ": self.total_energy_zJ,
            "event_count": self.event_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def __add__(self, other: "SimStats") -> "SimStats":
        return SimStats(
            dict(sorted((Counter(self.opcode_counts) + Counter(other.opcode_counts)).items())),
            {k: self.class_counts[k] + other.class_counts[k] for k in self.class_counts},
            self.total_time_ns + other.total_time_ns,
            self.total_energy_zJ + other.total_energy_zJ,
            self.event_count + other.event_count,
        )


@dataclass
class SimResult:
    stats: SimStats
    events: list[Event]
    qeu_busy_ns: list[int]

    def write_event_log(self, path: str | Path) -> None:
        Path(path).write_text("".join(e.format() + "\n" for e in self.events))


def _stats(counts: Mapping[Opcode, int], time_ns: int, energy_zJ: int, events: int) -> SimStats:
    classes = {gc.value: 0 for gc in GateClass}
    for op, c in counts.items():
        classes[op.gate_class.value] += c
    return SimStats(
        {op.value: c for op, c in sorted(counts.items()) if c},
        classes,
        time_ns,
        energy_zJ,
        events,
    )


class QpuNode:
    """Host, QCU and QEUs wired to one event queue."""

    def __init__(self, program: Program, microcode: MicrocodeTable, topology: NodeTopology):
        self.program = program
        self.topology = topology
        self.latency = topology.dispatch_latency_ns
        ops = [instr.opcode for instr in program.instructions]
        models = {op: microcode.resolve(op) for op in set(ops)}
        self._ops = ops
        self._duration = [models[op].duration_ns for op in ops]
        self._energy = [models[op].energy_zJ for op in ops]
        self._qeu = [topology.assignment[op] for op in ops]

        self.queue: list[tuple[int, int, int, int]] = []
        self.seq = 0
        self.now = 0
        self.log: list[Event] = []
        self.energy = 0
        self.counts: Counter = Counter()
        self.qeu_busy_ns = [0] * topology.qeu_count
        self._active: int | None = None
        self._last_complete = 0

    def schedule(self, time: int, kind: EventKind, index: int) -> None:
        heapq.heappush(self.queue, (time, self.seq, kind, index))
        self.seq += 1

    # host
    def _dispatch(self, i: int) -> None:
        self.schedule(self.now + self.latency, EventKind.OPCODE_ISSUE, i)

    # QCU: decode + route
    def _issue(self, i: int) -> None:
        self.schedule(self.now + self.latency, EventKind.GATE_START, i)

    # QEU
    def _start(self, i: int) -> None:
        if self._active is not None or self.now < self._last_complete:
            raise RuntimeError(f"instruction {i} started while another gate was active")
        self._active = i
        done = self.now + self._duration[i]
        if self._ops[i] is Opcode.READ:
            self.schedule(done, EventKind.READOUT_RETURN, i)
        self.schedule(done, EventKind.GATE_COMPLETE, i)

    def _readout(self, i: int) -> None:
        pass  # measurement result travels back to the QCU; no decoding modeled

    def _complete(self, i: int) -> None:
        self._active = None
        self._last_complete = self.now
        self.energy += self._energy[i]
        self.qeu_busy_ns[self._qeu[i]] += self._duration[i]
        self.counts[self._ops[i]] += 1
        if i + 1 < len(self._ops):
            self.schedule(self.now, EventKind.DISPATCH, i + 1)

    def run(self) -> SimResult:
        handlers = {
            EventKind.DISPATCH: self._dispatch,
            EventKind.OPCODE_ISSUE: self._issue,
            EventKind.GATE_START: self._start,
            EventKind.READOUT_RETURN: self._readout,
            EventKind.GATE_COMPLETE: self._complete,
        }
        if self._ops:
            self.schedule(0, EventKind.DISPATCH, 0)
        queue, log, pop = self.queue, self.log, heapq.heappop
        while queue:
            time, seq, kind, i = pop(queue)
            self.now = time
            log.append(Event(time, seq, kind, i))
            handlers[kind](i)
        stats = _stats(self.counts, self.now, self.energy, len(log))
        return SimResult(stats, log, self.qeu_busy_ns)


def simulate(program: Program, microcode: MicrocodeTable,
             topology: NodeTopology | None = None) -> SimResult:
    report = validate_program(program)
    if not report.ok:
        v = report.violations[0]
        raise ValueError(f"invalid program at instruction {v.index}: {v.message}")
    if program.level is not Level.PHYSICAL:
        raise ValueError("simulation needs a physical-level program")
    return QpuNode(program, microcode, topology or NodeTopology()).run()


def run_simulation(program: Program, microcode: MicrocodeTable,
                   topology: NodeTopology | None = None) -> SimStats:
    return simulate(program, microcode, topology).stats


def tally_stats(counts: Mapping[Opcode, int], microcode: MicrocodeTable,
                dispatch_latency_ns: int = 0) -> SimStats:
    """Serial-schedule totals straight from per-opcode counts."""
    time = energy = instructions = 0
    for op, c in counts.items():
        m = microcode.resolve(op)
        time += c * m.duration_ns
        energy += c * m.energy_zJ
        instructions += c
    time += instructions * HOPS * dispatch_latency_ns
    events = 4 * instructions + counts.get(Opcode.READ, 0)
    return _stats(counts, time, energy, events)


def analytic_tally(program: Program, microcode: MicrocodeTable,
                   dispatch_latency_ns: int = 0) -> SimStats:
    return tally_stats(Counter(instr.opcode for instr in program.instructions),
                       microcode, dispatch_latency_ns)
