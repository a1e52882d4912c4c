"""Grover search programs with a multi-controlled-NOT database, and their
lowering to the one- and two-qubit physical ISA.

Qubit ``i`` holds bit ``i`` of the basis-state index, so the marked element
is the basis state with index ``marked``. The database gate is a phase
oracle: X on every qubit whose marked bit is 0, then a multi-controlled Z over
all qubits written as H(target) MCX H(target), then the X's undone.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .isa import (
    Instruction,
    Level,
    Opcode,
    Program,
    validate_program,
)


@dataclass(frozen=True)
class SearchInstance:
    n: int
    marked: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 qubits, got n={self.n}")
        if not 0 <= self.marked < (1 << self.n):
            raise ValueError(f"marked={self.marked} outside [0, {1 << self.n})")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def zero_bits(self) -> int:
        return self.n - bin(self.marked).count("1")


@dataclass(frozen=True)
class GroverPlan:
    instance: SearchInstance
    iterations: int
    ancilla_count: int


def grover_iterations(N: int) -> int:
    if N < 4 or N & (N - 1):
        raise ValueError(f"database size must be a power of two >= 4, got {N}")
    return max(1, math.floor(math.pi / 4 * math.sqrt(N)))


def mcx_ancillas(k: int) -> int:
    """Clean ancillas the V-chain needs for ``k`` controls."""
    return max(0, k - 2)


def plan_grover(instance: SearchInstance) -> GroverPlan:
    # the MCZ target is one of the n qubits, so the MCX has n - 1 controls
    return GroverPlan(instance, grover_iterations(instance.N), mcx_ancillas(instance.n - 1))


def _mcx(controls: Sequence[int], target: int) -> Instruction:
    k = len(controls)
    if k == 1:
        return Instruction(Opcode.CNOT, (controls[0], target))
    if k == 2:
        return Instruction(Opcode.TOFFOLI, (*controls, target))
    return Instruction(Opcode.MCX, (*controls, target))


def _phase_flip_all_ones(n: int) -> list[Instruction]:
    target = n - 1
    return [
        Instruction(Opcode.H, (target,)),
        _mcx(range(target), target),
        Instruction(Opcode.H, (target,)),
    ]


def generate_grover(instance: SearchInstance) -> Program:
    n = instance.n
    qubits = range(n)
    layer = lambda op, qs: [Instruction(op, (q,)) for q in qs]  # noqa: E731

    flips = [q for q in qubits if not (instance.marked >> q) & 1]
    oracle = layer(Opcode.X, flips) + _phase_flip_all_ones(n) + layer(Opcode.X, flips)
    diffusion = (
        layer(Opcode.H, qubits)
        + layer(Opcode.X, qubits)
        + _phase_flip_all_ones(n)
        + layer(Opcode.X, qubits)
        + layer(Opcode.H, qubits)
    )

    body = layer(Opcode.INIT, qubits) + layer(Opcode.H, qubits)
    for _ in range(grover_iterations(instance.N)):
        body += oracle + diffusion
    body += layer(Opcode.READ, qubits)
    return Program(Level.LOGICAL, n, tuple(body))


# ---------------------------------------------------------------------------
# decomposition


def toffoli_gates(c0: int, c1: int, t: int) -> list[Instruction]:
    """Exact 15-gate Clifford+T Toffoli (6 CNOT, 7 T/T-dagger, 2 H)."""
    return list(_toffoli(c0, c1, t))


@lru_cache(maxsize=4096)
def _toffoli(c0: int, c1: int, t: int) -> tuple[Instruction, ...]:
    g = lambda op, *qs: Instruction(op, qs)  # noqa: E731
    return (
        g(Opcode.H, t),
        g(Opcode.CNOT, c1, t),
        g(Opcode.TDG, t),
        g(Opcode.CNOT, c0, t),
        g(Opcode.T, t),
        g(Opcode.CNOT, c1, t),
        g(Opcode.TDG, t),
        g(Opcode.CNOT, c0, t),
        g(Opcode.T, c1),
        g(Opcode.T, t),
        g(Opcode.H, t),
        g(Opcode.CNOT, c0, c1),
        g(Opcode.T, c0),
        g(Opcode.TDG, c1),
        g(Opcode.CNOT, c0, c1),
    )


def decompose_mcx(controls: Sequence[int], target: int, ancillas: Sequence[int] = ()) -> list[Instruction]:
    """Lower an MCX to physical gates.

    One control gives a CNOT, two give the 15-gate Toffoli, and k >= 3 controls
    give a V-chain of 2k - 3 Toffolis that computes the AND of the controls
    into k - 2 clean ancillas and uncomputes it afterwards.
    """
    controls = list(controls)
    k = len(controls)
    if k < 1:
        raise ValueError("MCX needs at least one control")
    need = mcx_ancillas(k)
    if len(ancillas) < need:
        raise ValueError(f"{k} controls need {need} ancillas, got {len(ancillas)}")
    anc = list(ancillas[:need])
    used = controls + [target] + anc
    if len(set(used)) != len(used):
        raise ValueError("controls, target and ancillas must be distinct")

    if k == 1:
        return [Instruction(Opcode.CNOT, (controls[0], target))]
    if k == 2:
        return toffoli_gates(controls[0], controls[1], target)

    compute = [(controls[0], controls[1], anc[0])]
    for i in range(2, k - 1):
        compute.append((controls[i], anc[i - 2], anc[i - 1]))
    chain = compute + [(controls[-1], anc[-1], target)] + compute[::-1]
    out: list[Instruction] = []
    for c0, c1, t in chain:
        out.extend(_toffoli(c0, c1, t))
    return out


def lower_to_physical(program: Program) -> Program:
    """Replace every TOFFOLI/MCX/MCZ by physical gates; ancillas are appended after
    the program's own qubits. Other instructions are copied in order."""
    report = validate_program(program)
    if not report.ok:
        v = report.violations[0]
        raise ValueError(f"invalid program at instruction {v.index}: {v.message}")

    extra = 0
    for instr in program.instructions:
        if instr.opcode in (Opcode.MCX, Opcode.MCZ, Opcode.TOFFOLI):
            extra = max(extra, mcx_ancillas(len(instr.operands) - 1))
    ancillas = list(range(program.capacity, program.capacity + extra))

    out: list[Instruction] = []
    for instr in program.instructions:
        op = instr.opcode
        if op in (Opcode.MCX, Opcode.TOFFOLI):
            out.extend(decompose_mcx(instr.operands[:-1], instr.operands[-1], ancillas))
        elif op is Opcode.MCZ:
            t = instr.operands[-1]
            out.append(Instruction(Opcode.H, (t,)))
            out.extend(decompose_mcx(instr.operands[:-1], t, ancillas))
            out.append(Instruction(Opcode.H, (t,)))
        else:
            out.append(instr)
    return Program(Level.PHYSICAL, program.capacity + extra, tuple(out))


# ---------------------------------------------------------------------------
# counts-only tallies

TOFFOLI_COUNTS = {Opcode.H: 2, Opcode.T: 4, Opcode.TDG: 3, Opcode.CNOT: 6}


def mcx_counts(k: int) -> Counter:
    if k == 1:
        return Counter({Opcode.CNOT: 1})
    toffolis = 1 if k == 2 else 2 * k - 3
    return Counter({op: c * toffolis for op, c in TOFFOLI_COUNTS.items()})


def logical_gate_count(instance: SearchInstance) -> int:
    n, r, z = instance.n, grover_iterations(instance.N), instance.zero_bits
    per_iteration = (2 * z + 3) + (4 * n + 3)
    return 3 * n + r * per_iteration


def grover_physical_counts(instance: SearchInstance) -> Counter:
    """Per-opcode tally of ``lower_to_physical(generate_grover(instance))`` without
    building the instruction list."""
    n, r, z = instance.n, grover_iterations(instance.N), instance.zero_bits
    per_iteration = Counter({Opcode.X: 2 * z + 2 * n, Opcode.H: 2 + 2 * n + 2})
    mcx = mcx_counts(n - 1)
    for _ in range(2):
        per_iteration.update(mcx)
    counts = Counter({Opcode.INIT: n, Opcode.H: n, Opcode.READ: n})
    for op, c in per_iteration.items():
        counts[op] += r * c
    return counts


def grover_physical_capacity(instance: SearchInstance) -> int:
    return instance.n + mcx_ancillas(instance.n - 1)
