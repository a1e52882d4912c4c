"""Instruction set, program text format and microcode (gate-model) tables.

A program is a header line ``<level> <capacity>`` followed by one instruction
per line::

    physical 2
    INIT q0
    H q0        # comments run to end of line
    CNOT q0 q1

The QCU view of a program is purely serial: instructions are parsed, validated
and resolved to a gate model one at a time.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping


class Level(str, enum.Enum):
    LOGICAL = "logical"
    PHYSICAL = "physical"


class GateClass(str, enum.Enum):
    INIT = "INIT"
    UNITARY = "UNITARY"
    READ = "READ"


class Opcode(str, enum.Enum):
    INIT = "INIT"
    READ = "READ"
    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    SDG = "SDG"
    T = "T"
    TDG = "TDG"
    CNOT = "CNOT"
    CZ = "CZ"
    TOFFOLI = "TOFFOLI"
    MCX = "MCX"
    MCZ = "MCZ"

    @property
    def arity(self) -> int | None:
        """Fixed operand count, or None for the variable-arity MCX/MCZ."""
        return _ARITY.get(self)

    @property
    def min_arity(self) -> int:
        return 3 if self.arity is None else self.arity

    @property
    def is_physical(self) -> bool:
        return self in PHYSICAL_OPCODES

    @property
    def gate_class(self) -> GateClass:
        if self is Opcode.INIT:
            return GateClass.INIT
        if self is Opcode.READ:
            return GateClass.READ
        return GateClass.UNITARY

    def __str__(self) -> str:
        return self.value


SINGLE_QUBIT_GATES = frozenset(
    {Opcode.H, Opcode.X, Opcode.Y, Opcode.Z, Opcode.S, Opcode.SDG, Opcode.T, Opcode.TDG}
)
TWO_QUBIT_GATES = frozenset({Opcode.CNOT, Opcode.CZ})
PHYSICAL_OPCODES = frozenset({Opcode.INIT, Opcode.READ}) | SINGLE_QUBIT_GATES | TWO_QUBIT_GATES
LOGICAL_ONLY_OPCODES = frozenset({Opcode.TOFFOLI, Opcode.MCX, Opcode.MCZ})

_ARITY = {op: 1 for op in SINGLE_QUBIT_GATES | {Opcode.INIT, Opcode.READ}}
_ARITY.update({Opcode.CNOT: 2, Opcode.CZ: 2, Opcode.TOFFOLI: 3})


@dataclass(frozen=True)
class Instruction:
    """One opcode plus register addresses; for controlled gates the last operand is the target."""

    opcode: Opcode
    operands: tuple[int, ...]

    def __str__(self) -> str:
        return " ".join([self.opcode.value, *(f"q{q}" for q in self.operands)])


@dataclass(frozen=True)
class Program:
    level: Level
    capacity: int
    instructions: tuple[Instruction, ...] = ()

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)


def make_program(level: Level | str, capacity: int, instructions: Iterable[Instruction] = ()) -> Program:
    return Program(Level(level), capacity, tuple(instructions))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    index: int | None  # None for program-level violations
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _instruction_violations(instr: Instruction, capacity: int, level: Level) -> list[tuple[str, str]]:
    found = []
    op, operands = instr.opcode, instr.operands
    if op.arity is not None and len(operands) != op.arity:
        found.append(("arity", f"{op} takes {op.arity} operand(s), got {len(operands)}"))
    elif op.arity is None and len(operands) < op.min_arity:
        found.append(("arity", f"{op} needs at least {op.min_arity} operands, got {len(operands)}"))
    if len(set(operands)) != len(operands):
        found.append(("duplicate-operands", f"{instr} addresses a qubit more than once"))
    for q in operands:
        if q < 0:
            found.append(("negative-address", f"q{q} is negative"))
        elif q >= capacity:
            found.append(("address-range", f"q{q} exceeds capacity {capacity}"))
    if level is Level.PHYSICAL and not op.is_physical:
        found.append(("logical-opcode", f"{op} is not in the physical ISA"))
    return found


def validate_program(program: Program) -> ValidationReport:
    violations = []
    if program.capacity < 0:
        violations.append(Violation(None, "capacity", f"negative capacity {program.capacity}"))
    for i, instr in enumerate(program.instructions):
        for rule, msg in _instruction_violations(instr, program.capacity, program.level):
            violations.append(Violation(i, rule, msg))
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# text format


class ProgramParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_OPERAND = re.compile(r"q(\d+)")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_program(text: str) -> Program:
    """Parse program text; raises ProgramParseError carrying the offending line number."""
    header = None
    instructions: list[Instruction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) != 2:
                raise ProgramParseError(lineno, f"expected header '<level> <capacity>', got {line!r}")
            try:
                level = Level(tokens[0].lower())
            except ValueError:
                raise ProgramParseError(lineno, f"unknown level {tokens[0]!r}") from None
            if not tokens[1].isdigit():
                raise ProgramParseError(lineno, f"invalid capacity {tokens[1]!r}")
            header = (level, int(tokens[1]))
            continue

        level, capacity = header
        try:
            opcode = Opcode(tokens[0].upper())
        except ValueError:
            raise ProgramParseError(lineno, f"unknown opcode {tokens[0]!r}") from None
        operands = []
        for tok in tokens[1:]:
            m = _OPERAND.fullmatch(tok.lower())
            if m is None:
                raise ProgramParseError(lineno, f"malformed operand {tok!r}")
            operands.append(int(m.group(1)))
        instr = Instruction(opcode, tuple(operands))
        problems = _instruction_violations(instr, capacity, level)
        if problems:
            raise ProgramParseError(lineno, problems[0][1])
        instructions.append(instr)

    if header is None:
        raise ProgramParseError(0, "missing header line")
    return Program(header[0], header[1], tuple(instructions))


def render_program(program: Program) -> str:
    lines = [f"{program.level.value} {program.capacity}"]
    lines.extend(str(instr) for instr in program.instructions)
    return "\n".join(lines) + "\n"


def read_program(path: str | Path) -> Program:
    return parse_program(Path(path).read_text())


def write_program(program: Program, path: str | Path) -> None:
    Path(path).write_text(render_program(program))


# ---------------------------------------------------------------------------
# gate models / microcode


@dataclass(frozen=True)
class GateModel:
    """Time and energy cost of one gate class.

    Energy is what gets tallied. Power is carried as metadata only: the
    shipped INIT/READ rows do not satisfy duration * power == energy.
    """

    gate_class: GateClass
    duration_ns: int
    power_aW: int
    energy_zJ: int

    def __post_init__(self):
        for name in ("duration_ns", "power_aW", "energy_zJ"):
            if not isinstance(getattr(self, name), int):
                raise TypeError(f"{name} must be an integer")
        if self.duration_ns <= 0:
            raise ValueError("duration_ns must be positive")
        if self.power_aW < 0 or self.energy_zJ < 0:
            raise ValueError("power and energy must be nonnegative")

    def to_dict(self) -> dict[str, int]:
        return {"duration_ns": self.duration_ns, "power_aW": self.power_aW, "energy_zJ": self.energy_zJ}


class UnresolvableOpcodeError(KeyError):
    pass


@dataclass(frozen=True)
class MicrocodeTable:
    """Opcode -> GateModel lookup: INIT and READ map to their own class, every other
    physical opcode to UNITARY, unless a per-opcode override is present."""

    classes: Mapping[GateClass, GateModel]
    overrides: Mapping[Opcode, GateModel] = field(default_factory=dict)

    def __post_init__(self):
        missing = set(GateClass) - set(self.classes)
        if missing:
            raise ValueError(f"missing gate models for {sorted(c.value for c in missing)}")
        for op in self.overrides:
            if not op.is_physical:
                raise ValueError(f"override for non-physical opcode {op}")

    def resolve(self, opcode: Opcode) -> GateModel:
        if not opcode.is_physical:
            raise UnresolvableOpcodeError(f"{opcode} has no microcode entry (logical-only opcode)")
        model = self.overrides.get(opcode)
        return model if model is not None else self.classes[opcode.gate_class]

    @property
    def entries(self) -> dict[Opcode, GateModel]:
        return {op: self.resolve(op) for op in Opcode if op.is_physical}

    def to_dict(self) -> dict:
        out: dict = {c.value: self.classes[c].to_dict() for c in GateClass}
        if self.overrides:
            out["overrides"] = {op.value: {"gate_class": m.gate_class.value, **m.to_dict()}
                                for op, m in sorted(self.overrides.items())}
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "MicrocodeTable":
        classes = {}
        for gc in GateClass:
            if gc.value not in data:
                raise ValueError(f"gate-model config lacks {gc.value}")
            classes[gc] = _gate_model(gc, data[gc.value])
        overrides = {}
        for name, entry in dict(data.get("overrides", {})).items():
            op = Opcode(name.upper())
            gc = GateClass(entry.get("gate_class", op.gate_class.value))
            overrides[op] = _gate_model(gc, entry)
        return cls(classes, overrides)


def _gate_model(gc: GateClass, entry: Mapping) -> GateModel:
    try:
        return GateModel(gc, entry["duration_ns"], entry["power_aW"], entry["energy_zJ"])
    except KeyError as exc:
        raise ValueError(f"{gc.value} gate model lacks {exc.args[0]}") from None


def load_gate_models(path: str | Path | None = None) -> MicrocodeTable:
    """Load a gate-model JSON file; with no path, the shipped default table."""
    if path is None:
        text = resources.files("qpunode").joinpath("data/gate_models.json").read_text()
    else:
        text = Path(path).read_text()
    return MicrocodeTable.from_dict(json.loads(text))


def save_gate_models(table: MicrocodeTable, path: str | Path) -> None:
    Path(path).write_text(json.dumps(table.to_dict(), indent=2) + "\n")
