"""Exit criteria for the package. Each test records one PASS/FAIL line, printed
in the "acceptance criteria" section of the pytest summary."""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS, random_physical_program
from qpunode.grover import SearchInstance, decompose_mcx, generate_grover, lower_to_physical, toffoli_gates
from qpunode.isa import GateClass, Opcode, Level, Program, load_gate_models, parse_program, save_gate_models
from qpunode.qec import GateClassTally, QecConfig, gate_overhead, lower_qec, physical_qubits
from qpunode.sim import EventKind, analytic_tally, run_simulation, simulate
from qpunode.sweep import SweepSpec, fit_scaling, run_sweep
from qpunode.unitary import circuit_unitary, equal_up_to_phase, mcx_matrix


def record(name, ok, detail):
    ACCEPTANCE_RESULTS[name] = (bool(ok), detail)
    assert ok, f"{name}: {detail}"


def test_c1_table_fidelity(tmp_path):
    t0 = time.perf_counter()
    mc = load_gate_models()
    save_gate_models(mc, tmp_path / "gm.json")
    again = load_gate_models(tmp_path / "gm.json")
    rows = {gc: (again.classes[gc].duration_ns, again.classes[gc].energy_zJ) for gc in GateClass}
    expected = {GateClass.INIT: (300_000, 5_000), GateClass.UNITARY: (40, 4), GateClass.READ: (100_000, 5_000)}
    stats = run_simulation(parse_program("physical 1\nINIT q0\nH q0\nREAD q0\n"), again)
    elapsed = time.perf_counter() - t0
    ok = (again == mc and rows == expected and stats.total_time_ns == 400_040
          and stats.total_energy_zJ == 10_004 and elapsed < 1)
    record("C1 Table 1 fidelity", ok,
           f"time={stats.total_time_ns} ns energy={stats.total_energy_zJ} zJ ({elapsed:.3f}s)")


@pytest.fixture(scope="module")
def random_runs():
    mc = load_gate_models()
    rng = random.Random(20261015)
    equal = serial = 0
    sizes = []
    t0 = time.perf_counter()
    for _ in range(100):
        p = random_physical_program(rng, rng.randint(1, 10_000), capacity=rng.randint(2, 16))
        sizes.append(len(p))
        result = simulate(p, mc)
        equal += result.stats == analytic_tally(p, mc)
        start = {}
        complete = {}
        for e in result.events:
            if e.kind is EventKind.GATE_START:
                start[e.index] = e.timestamp
            elif e.kind is EventKind.GATE_COMPLETE:
                complete[e.index] = e.timestamp
        serial += all(start[i + 1] >= complete[i] for i in range(len(p) - 1))
    return equal, serial, max(sizes), time.perf_counter() - t0


def test_c2_oracle_equivalence(random_runs):
    equal, _, largest, elapsed = random_runs
    record("C2 oracle equivalence", equal == 100 and elapsed < 10,
           f"{equal}/100 programs equal (largest {largest} instr, {elapsed:.2f}s)")


def test_c3_serial_schedule(random_runs):
    _, serial, _, _ = random_runs
    record("C3 serial schedule", serial == 100, f"{serial}/100 event logs serial")


def test_c4_grover_desk_scale():
    t0 = time.perf_counter()
    p4 = [abs(circuit_unitary(lower_to_physical(generate_grover(SearchInstance(2, m))))[m, 0]) ** 2
          for m in range(4)]
    p8 = [abs(circuit_unitary(lower_to_physical(generate_grover(SearchInstance(3, m))))[m, 0]) ** 2
          for m in range(8)]
    elapsed = time.perf_counter() - t0
    ok = all(abs(p - 1) <= 1e-9 for p in p4) and min(p8) >= 0.94 and elapsed < 5
    record("C4 Grover correctness", ok, f"N=4 min {min(p4):.12f}, N=8 min {min(p8):.6f} ({elapsed:.2f}s)")


def test_c5_decomposition_equivalence():
    t0 = time.perf_counter()
    tof = circuit_unitary(Program(Level.PHYSICAL, 3, tuple(toffoli_gates(0, 1, 2))))
    dev_tof = equal_up_to_phase(tof, mcx_matrix(3, [0, 1], 2))
    vchain = circuit_unitary(Program(Level.PHYSICAL, 5, tuple(decompose_mcx([0, 1, 2], 3, [4]))))
    clean = [c for c in range(32) if not (c >> 4) & 1]
    dev_v = equal_up_to_phase(vchain[:, clean], mcx_matrix(5, [0, 1, 2], 3)[:, clean])
    elapsed = time.perf_counter() - t0
    record("C5 decomposition equivalence", max(dev_tof, dev_v) <= 1e-9 and elapsed < 1,
           f"Toffoli dev {dev_tof:.1e}, 3-control V-chain dev {dev_v:.1e}")


def test_c6_scaling():
    t0 = time.perf_counter()
    rows = run_sweep(SweepSpec(10, 24, levels=(0,), materialize_limit=0))
    fit = fit_scaling(rows, "physical_gates")
    elapsed = time.perf_counter() - t0
    record("C6 scaling slope", 0.45 <= fit.slope <= 0.60 and elapsed < 5,
           f"slope {fit.slope:.4f} (required [0.45, 0.60]), residual {fit.residual:.4f}")


def test_c7_qec_overhead():
    t0 = time.perf_counter()
    qubits_ok = all(physical_qubits(n, QecConfig(L)).data == n * 7**L for n in range(1, 30) for L in (0, 1, 2))

    programs = [lower_to_physical(generate_grover(SearchInstance(n, 1))) for n in (2, 3, 5)]
    programs += [random_physical_program(random.Random(s), 25) for s in range(5)]
    monotone = True
    for p in programs:
        totals = [lower_qec(GateClassTally.of_program(p), QecConfig(L)).tally.total for L in (0, 1, 2)]
        monotone &= totals[0] < totals[1] < totals[2]

    ten = random_physical_program(random.Random(7), 10, capacity=4)
    res = lower_qec(ten, QecConfig(1))
    materialized_ok = res.program is not None and GateClassTally.of_program(res.program) == res.tally
    elapsed = time.perf_counter() - t0
    factors = {L: gate_overhead(Opcode.H, QecConfig(L))
               for L in (1, 2)}
    record("C7 QEC overhead", qubits_ok and monotone and materialized_ok and elapsed < 5,
           f"data qubits n*7^L ok={qubits_ok}, monotone={monotone}, materialized==counts={materialized_ok}; "
           f"per-1q-gate overhead L1={factors[1]} L2={factors[2]}")


@pytest.fixture(scope="module")
def fig5_rows():
    t0 = time.perf_counter()
    rows = run_sweep(SweepSpec(4, 20))
    return rows, time.perf_counter() - t0


def test_c8_energy_curve_shape(fig5_rows):
    rows, elapsed = fig5_rows
    by = {(r["n"], r["qec_levels"]): r for r in rows}
    ns = range(4, 21)

    cpu = [by[n, 0] for n in ns]
    exact_linear = all(b[col] == 2 * a[col] for a, b in zip(cpu, cpu[1:])
                       for col in ("cpu_energy_nomem_zJ", "cpu_energy_mem_zJ"))
    slopes = [fit_scaling(cpu, col).slope for col in ("cpu_energy_nomem_zJ", "cpu_energy_mem_zJ")]
    linear = exact_linear and all(abs(s - 1.0) <= 1e-9 for s in slopes)

    ordered = all(by[n, 0]["qpu_energy_zJ"] < by[n, 1]["qpu_energy_zJ"] < by[n, 2]["qpu_energy_zJ"] for n in ns)

    ratio = [Fraction(by[n, 2]["qpu_energy_zJ"], by[n, 2]["cpu_energy_mem_zJ"]) for n in range(8, 21)]
    decreasing = all(b < a for a, b in zip(ratio, ratio[1:]))

    record("C8 energy curve shape", linear and ordered and decreasing and elapsed < 10,
           f"cpu linear={linear} (slopes {slopes[0]:.12f}, {slopes[1]:.12f}), L0<L1<L2={ordered}, "
           f"L2/cpu ratio decreasing={decreasing} ({float(ratio[0]):.2e} -> {float(ratio[-1]):.2e}), "
           f"{elapsed:.2f}s")


def test_c9_determinism(tmp_path):
    t0 = time.perf_counter()
    run_sweep(SweepSpec(4, 20, out=tmp_path / "a.csv"))
    run_sweep(SweepSpec(4, 20, out=tmp_path / "b.csv"))
    elapsed = time.perf_counter() - t0
    same = (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    record("C9 determinism", same and elapsed < 10, f"byte-identical={same} ({elapsed:.2f}s for two sweeps)")


def test_sweep_matches_grover_pipeline(fig5_rows):
    rows, _ = fig5_rows
    row = next(r for r in rows if r["n"] == 4 and r["qec_levels"] == 0)
    p = lower_to_physical(generate_grover(SearchInstance(4, 0)))
    assert row["qpu_energy_zJ"] == analytic_tally(p, load_gate_models()).total_energy_zJ
    assert np.isclose(row["total_time_ns"], run_simulation(p, load_gate_models()).total_time_ns)
