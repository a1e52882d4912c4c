import random

import pytest

from qpunode.isa import PHYSICAL_OPCODES, Instruction, Level, Program, load_gate_models

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def random_physical_program(rng: random.Random, length: int, capacity: int = 6) -> Program:
    ops = sorted(PHYSICAL_OPCODES)
    instrs = []
    for _ in range(length):
        op = rng.choice(ops)
        instrs.append(Instruction(op, tuple(rng.sample(range(capacity), op.arity))))
    return Program(Level.PHYSICAL, capacity, tuple(instrs))


@pytest.fixture
def microcode():
    return load_gate_models()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in sorted(ACCEPTANCE_RESULTS.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
