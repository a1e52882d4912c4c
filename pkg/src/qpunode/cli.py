"""Command-line entry point: ``qpunode {grover,simulate,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys

from .grover import SearchInstance, generate_grover, lower_to_physical
from .isa import load_gate_models, read_program, render_program
from .qec import load_qec_config, lower_qec
from .sim import NodeTopology, simulate
from .sweep import SweepSpec, format_csv, run_sweep


def _levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not levels:
        raise argparse.ArgumentTypeError("no levels given")
    return levels


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpunode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grover", help="generate a Grover search program")
    g.add_argument("--n", type=int, required=True, help="qubits (database size N = 2^n)")
    g.add_argument("--marked", type=int, required=True)
    g.add_argument("--emit", help="output file (default: stdout)")
    g.add_argument("--physical", action="store_true", help="lower to the 1-2 qubit physical ISA")

    s = sub.add_parser("simulate", help="run a physical program through the node model")
    s.add_argument("--program", required=True)
    s.add_argument("--gate-models", help="gate-model JSON (default: shipped table)")
    s.add_argument("--event-log", help="write one line per event to this file")
    s.add_argument("--latency", type=int, default=0, help="dispatch latency per hop, ns")
    s.add_argument("--levels", type=int, default=0, help="QEC levels to expand before simulating")
    s.add_argument("--qec", help="QEC config JSON")

    w = sub.add_parser("sweep", help="energy sweep over database sizes and QEC levels")
    w.add_argument("--n-min", type=int, required=True)
    w.add_argument("--n-max", type=int, required=True)
    w.add_argument("--levels", type=_levels, default=(0, 1, 2))
    w.add_argument("--gate-models")
    w.add_argument("--cpu-model")
    w.add_argument("--qec")
    w.add_argument("--marked", type=int, default=0)
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--out", help="CSV path (default: stdout)")
    return parser


def _grover(args) -> None:
    program = generate_grover(SearchInstance(args.n, args.marked))
    if args.physical:
        program = lower_to_physical(program)
    text = render_program(program)
    if args.emit:
        with open(args.emit, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _simulate(args) -> None:
    program = read_program(args.program)
    microcode = load_gate_models(args.gate_models)
    if args.levels:
        config = load_qec_config(args.qec).with_levels(args.levels)
        result = lower_qec(program, config)
        if result.program is None:
            raise ValueError("program too large to materialize at this QEC level; use `sweep`")
        program = result.program
    result = simulate(program, microcode, NodeTopology(dispatch_latency_ns=args.latency))
    if args.event_log:
        result.write_event_log(args.event_log)
    sys.stdout.write(json.dumps(result.stats.as_dict(), indent=2) + "\n")


def _sweep(args) -> None:
    spec = SweepSpec(args.n_min, args.n_max, args.levels, args.gate_models, args.cpu_model,
                     args.qec, args.out, args.marked, jobs=args.jobs)
    rows = run_sweep(spec)
    if args.out is None:
        sys.stdout.write(format_csv(rows))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"grover": _grover, "simulate": _simulate, "sweep": _sweep}[args.command]
    try:
        handler(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"qpunode {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
