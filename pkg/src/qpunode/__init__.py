"""Discrete-event time/energy model of a QPU-accelerated compute node."""

from .baseline import CpuModel, cpu_search_energy, load_cpu_model
from .grover import (
    SearchInstance,
    decompose_mcx,
    generate_grover,
    grover_iterations,
    lower_to_physical,
)
from .isa import (
    Instruction,
    Level,
    MicrocodeTable,
    Opcode,
    Program,
    load_gate_models,
    parse_program,
    render_program,
    validate_program,
)
from .qec import QecConfig, ec_round_cost, lower_qec, physical_qubits
from .sim import NodeTopology, SimStats, analytic_tally, run_simulation, simulate
from .sweep import SweepSpec, fit_scaling, run_sweep

__version__ = "0.1.0"
