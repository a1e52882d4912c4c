"""Dense unitary of a tiny physical program, used to check decompositions and
small Grover instances. Qubit ``i`` is bit ``i`` of the basis index."""

from __future__ import annotations

import numpy as np

from .isa import Opcode, Program

MAX_QUBITS = 5

_S2 = 1 / np.sqrt(2)
_ONE_QUBIT = {
    Opcode.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    Opcode.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Opcode.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Opcode.Z: np.diag([1, -1]).astype(complex),
    Opcode.S: np.diag([1, 1j]),
    Opcode.SDG: np.diag([1, -1j]),
    Opcode.T: np.diag([1, np.exp(1j * np.pi / 4)]),
    Opcode.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]),
}
_CONTROLLED_TARGET = {Opcode.CNOT: _ONE_QUBIT[Opcode.X], Opcode.CZ: _ONE_QUBIT[Opcode.Z]}


def _apply(state: np.ndarray, n: int, gate: np.ndarray, target: int, control: int | None = None) -> np.ndarray:
    # state: (2,)*n + (cols,), axis n-1-q holds qubit q
    t_ax = n - 1 - target
    moved = np.moveaxis(state, t_ax, 0)
    if control is None:
        new = np.tensordot(gate, moved, axes=([1], [0]))
        return np.moveaxis(new, 0, t_ax)
    c_ax = n - 1 - control
    c_ax_moved = c_ax + 1 if c_ax < t_ax else c_ax
    out = moved.copy()
    sel = [slice(None)] * moved.ndim
    sel[c_ax_moved] = 1
    sel = tuple(sel)
    sub = moved[sel]
    out[sel] = np.tensordot(gate, sub, axes=([1], [0]))
    return np.moveaxis(out, 0, t_ax)


def circuit_unitary(program: Program, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Ordered product of the program's gate matrices.

    A leading block of INIT and a trailing block of READ are skipped; INIT or
    READ anywhere else is an error because the result would not be unitary.
    """
    n = program.capacity
    if n > max_qubits:
        raise ValueError(f"capacity {n} exceeds the {max_qubits}-qubit limit")
    instrs = list(program.instructions)
    start = 0
    while start < len(instrs) and instrs[start].opcode is Opcode.INIT:
        start += 1
    stop = len(instrs)
    while stop > start and instrs[stop - 1].opcode is Opcode.READ:
        stop -= 1

    dim = 1 << n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for instr in instrs[start:stop]:
        op = instr.opcode
        if op in _ONE_QUBIT:
            state = _apply(state, n, _ONE_QUBIT[op], instr.operands[0])
        elif op in _CONTROLLED_TARGET:
            c, t = instr.operands
            state = _apply(state, n, _CONTROLLED_TARGET[op], t, control=c)
        elif op in (Opcode.INIT, Opcode.READ):
            raise ValueError(f"{op} interleaved with gates")
        else:
            raise ValueError(f"{op} is not a physical gate")
    return state.reshape(dim, dim)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max-entry deviation between ``a`` and ``b`` after removing the best global phase."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


def mcx_matrix(n: int, controls, target: int) -> np.ndarray:
    """Permutation matrix of an MCX on ``n`` qubits."""
    dim = 1 << n
    cmask = sum(1 << c for c in controls)
    m = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        row = col ^ (1 << target) if col & cmask == cmask else col
        m[row, col] = 1
    return m
