"""Resource accounting for concatenated Steane [[7,1,3]] error correction with
Shor-style (verified cat state) syndrome extraction.

One level of encoding maps every gate on a logical qubit to seven transversal
copies on its code block, followed by error-correction rounds on each block the
gate touched. An EC round measures the six weight-4 stabilizers, each with a
4-qubit cat state and one verifier qubit. Operations inside an EC round at
level L are themselves level L-1 logical operations, so applying the one-level
map L times gives the physical tally; counts multiply across levels.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from .isa import (
    GateClass,
    Instruction,
    Level,
    Opcode,
    Program,
    TWO_QUBIT_GATES,
)

BLOCK = 7
STABILIZERS = 6
# data-qubit support of the Steane stabilizers (same supports for X and Z type)
STABILIZER_SUPPORT = ((3, 4, 5, 6), (1, 2, 5, 6), (0, 2, 4, 6))

DEFAULT_STABILIZER_COST = {Opcode.INIT: 5, Opcode.H: 1, Opcode.CNOT: 9, Opcode.READ: 5}
MATERIALIZE_DATA_QUBITS = 200


@dataclass(frozen=True)
class GateClassTally:
    """Per-opcode gate counts; class totals are derived from the opcode breakdown."""

    by_opcode: Mapping[Opcode, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for op, c in self.by_opcode.items():
            op = Opcode(op)
            if c < 0:
                raise ValueError(f"negative count for {op}")
            if c:
                clean[op] = clean.get(op, 0) + c
        object.__setattr__(self, "by_opcode", dict(sorted(clean.items())))

    @classmethod
    def of_program(cls, program: Program) -> "GateClassTally":
        return cls(Counter(instr.opcode for instr in program.instructions))

    @property
    def counts(self) -> dict[GateClass, int]:
        out = {gc: 0 for gc in GateClass}
        for op, c in self.by_opcode.items():
            out[op.gate_class] += c
        return out

    @property
    def total(self) -> int:
        return sum(self.by_opcode.values())

    def __add__(self, other: "GateClassTally") -> "GateClassTally":
        return GateClassTally(Counter(self.by_opcode) + Counter(other.by_opcode))

    def scaled(self, k: int) -> "GateClassTally":
        return GateClassTally({op: c * k for op, c in self.by_opcode.items()})


@dataclass(frozen=True)
class EcPolicy:
    rounds_per_block: int = 1
    after_init: bool = True
    after_read: bool = False


@dataclass(frozen=True)
class QecConfig:
    levels: int = 2
    stabilizer_cost: Mapping[Opcode, int] = field(default_factory=lambda: dict(DEFAULT_STABILIZER_COST))
    ec_policy: EcPolicy = EcPolicy()
    t_gate_multiplier: int = 1

    def __post_init__(self):
        if self.levels < 0:
            raise ValueError("levels must be >= 0")
        cost = {Opcode(op): c for op, c in self.stabilizer_cost.items()}
        if any(not isinstance(c, int) or c < 0 for c in cost.values()):
            raise ValueError("stabilizer costs must be nonnegative integers")
        bad = [op for op in cost if not op.is_physical]
        if bad:
            raise ValueError(f"stabilizer cost uses non-physical opcodes {bad}")
        object.__setattr__(self, "stabilizer_cost", cost)
        if self.ec_policy.rounds_per_block < 0 or self.t_gate_multiplier < 1:
            raise ValueError("rounds_per_block must be >= 0 and t_gate_multiplier >= 1")

    def with_levels(self, levels: int) -> "QecConfig":
        return QecConfig(levels, self.stabilizer_cost, self.ec_policy, self.t_gate_multiplier)

    @property
    def ancillas_per_level(self) -> int:
        # cat + verifier qubits of one stabilizer measurement, reused across stabilizers
        return self.stabilizer_cost.get(Opcode.INIT, 0)

    @classmethod
    def from_dict(cls, data: Mapping) -> "QecConfig":
        kwargs = {}
        if "levels" in data:
            kwargs["levels"] = int(data["levels"])
        if "stabilizer_cost" in data:
            cost = dict(DEFAULT_STABILIZER_COST)
            cost.update({Opcode(k.upper()): v for k, v in data["stabilizer_cost"].items()})
            kwargs["stabilizer_cost"] = cost
        if "ec_policy" in data:
            kwargs["ec_policy"] = EcPolicy(**data["ec_policy"])
        if "t_gate_multiplier" in data:
            kwargs["t_gate_multiplier"] = int(data["t_gate_multiplier"])
        return cls(**kwargs)


def load_qec_config(path: str | Path | None = None) -> QecConfig:
    if path is None:
        text = resources.files("qpunode").joinpath("data/qec.json").read_text()
    else:
        text = Path(path).read_text()
    return QecConfig.from_dict(json.loads(text))


@dataclass(frozen=True)
class QubitCount:
    data: int
    ancilla: int

    @property
    def total(self) -> int:
        return self.data + self.ancilla


def physical_qubits(n: int, config: QecConfig) -> QubitCount:
    """Data qubits n*7^L plus peak ancilla demand.

    Each level keeps one stabilizer's worth of ancillas, encoded at the levels
    below it, so the pool is a * (7^(L-1) + ... + 1).
    """
    if n < 1:
        raise ValueError("need at least one logical qubit")
    L = config.levels
    a = config.ancillas_per_level
    return QubitCount(n * BLOCK**L, sum(a * BLOCK**j for j in range(L)))


def ec_round_cost(config: QecConfig) -> GateClassTally:
    """One EC round on one code block, as operations one level down."""
    return GateClassTally(config.stabilizer_cost).scaled(STABILIZERS)


def _ec_triggered(op: Opcode, policy: EcPolicy) -> bool:
    if op is Opcode.INIT:
        return policy.after_init
    if op is Opcode.READ:
        return policy.after_read
    return True


def _encode_once(tally: GateClassTally, config: QecConfig) -> GateClassTally:
    ec = Counter(ec_round_cost(config).by_opcode)
    out: Counter = Counter()
    for op, c in tally.by_opcode.items():
        copies = BLOCK * (config.t_gate_multiplier if op in (Opcode.T, Opcode.TDG) else 1)
        out[op] += copies * c
        if _ec_triggered(op, config.ec_policy):
            blocks = 2 if op in TWO_QUBIT_GATES else 1
            rounds = c * blocks * config.ec_policy.rounds_per_block
            for ec_op, ec_c in ec.items():
                out[ec_op] += rounds * ec_c
    return GateClassTally(out)


def gate_overhead(opcode: Opcode, config: QecConfig) -> int:
    """Physical operations produced by one logical ``opcode`` at ``config.levels``."""
    return lower_qec(GateClassTally({opcode: 1}), config).tally.total


@dataclass(frozen=True)
class QecResult:
    tally: GateClassTally
    program: Program | None = None


def lower_qec(source: Program | GateClassTally, config: QecConfig,
              materialize_limit: int = 10**6) -> QecResult:
    """Tally a physical-ISA program after ``config.levels`` of encoding.

    For a Program input whose data qubits n*7^L stay within 200 and whose
    expanded length stays within ``materialize_limit``, the expanded
    instruction stream is built as well.
    """
    if isinstance(source, Program):
        if source.level is not Level.PHYSICAL or any(not i.opcode.is_physical for i in source):
            raise ValueError("lower_qec needs a physical-ISA program; lower logical gates first")
        tally = GateClassTally.of_program(source)
    else:
        bad = [op for op in source.by_opcode if not op.is_physical]
        if bad:
            raise ValueError(f"logical-only opcodes in tally: {bad}")
        tally = source

    for _ in range(config.levels):
        tally = _encode_once(tally, config)

    program = None
    if (isinstance(source, Program)
            and source.capacity * BLOCK**config.levels <= MATERIALIZE_DATA_QUBITS
            and tally.total <= materialize_limit
            and dict(config.stabilizer_cost) == DEFAULT_STABILIZER_COST):
        program = materialize_qec(source, config)
    return QecResult(tally, program)


# ---------------------------------------------------------------------------
# materialized expansion


@lru_cache(maxsize=1024)
def _shor_ec_round(block: int, anc: int) -> tuple[Instruction, ...]:
    g = lambda op, *qs: Instruction(op, qs)  # noqa: E731
    cat = [anc + i for i in range(4)]
    verifier = anc + 4
    out = []
    for support in STABILIZER_SUPPORT:
        for _stype in ("X", "Z"):
            out += [g(Opcode.INIT, q) for q in cat] + [g(Opcode.INIT, verifier)]
            out.append(g(Opcode.H, cat[0]))
            out += [g(Opcode.CNOT, cat[i], cat[i + 1]) for i in range(3)]
            out += [g(Opcode.CNOT, cat[0], verifier), g(Opcode.CNOT, cat[3], verifier)]
            out += [g(Opcode.CNOT, c, block * BLOCK + d) for c, d in zip(cat, support)]
            out += [g(Opcode.READ, q) for q in cat] + [g(Opcode.READ, verifier)]
    return tuple(out)


def _encode_program_once(program: Program, config: QecConfig) -> Program:
    anc = BLOCK * program.capacity
    policy = config.ec_policy
    out: list[Instruction] = []
    for instr in program.instructions:
        op = instr.opcode
        reps = config.t_gate_multiplier if op in (Opcode.T, Opcode.TDG) else 1
        for _ in range(reps):
            for i in range(BLOCK):
                out.append(Instruction(op, tuple(BLOCK * q + i for q in instr.operands)))
        if _ec_triggered(op, policy):
            for q in instr.operands:
                for _ in range(policy.rounds_per_block):
                    out.extend(_shor_ec_round(q, anc))
    capacity = anc + config.ancillas_per_level if config.levels else program.capacity
    return Program(Level.PHYSICAL, capacity, tuple(out))


def materialize_qec(program: Program, config: QecConfig) -> Program:
    """Build the encoded instruction stream explicitly (small programs only).

    Logical qubit q becomes block qubits 7q..7q+6; each level appends five
    ancillas (four cat qubits, one verifier) after the encoded qubits.
    """
    for _ in range(config.levels):
        program = _encode_program_once(program, config)
    return program
