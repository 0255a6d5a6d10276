"""Command-line front end.

Exit codes: 0 success, 1 a verification or optimisation target was not met,
2 the input was malformed or unphysical.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .channels import KINDS, action_distance, convert, unitarity_residual
from .circuit import accumulate, dominated_term, per_step_trace
from .clock import clock_solve, compare_with_reference
from .errors import (
    ImpossibleOutcome,
    InvalidArgument,
    NoSolution,
    PhysicalityError,
    VerificationFailure,
)
from .gates import (
    decomposed_parity_circuit,
    is_clifford,
    sequence_product,
    sspc_unitary,
    verify_parity_semantics,
)
from .grape import GrapeOptions, grape_optimize
from .noise import MODELS, NoiseSpec, calibrate_p, compare_decomposed_vs_sspc
from .pipeline import analyze
from .spin import (
    control_operators,
    drift_hamiltonian,
    pulse_spectrum,
    transition_frequencies,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 20240601


class Outcome:
    def __init__(self, results, ok=True, inputs=None, settings=None, csv_writer=None, summary=""):
        self.results = results
        self.ok = ok
        self.inputs = inputs or {}
        self.settings = settings or {}
        self.csv_writer = csv_writer
        self.summary = summary


def _digest(paths) -> dict:
    return {str(p): io.file_digest(p) for p in paths}


def cmd_analyze(args) -> Outcome:
    ideal = io.load_channel(args.ideal)
    exp = io.load_channel(args.experimental)
    result = analyze(ideal, exp, tp_tol=args.tol if args.tol is not None else 1e-6)
    return Outcome(
        result.to_dict(),
        inputs=_digest([args.ideal, args.experimental]),
        summary=f"p_i = {result.perfection:.6f}",
    )


def cmd_accumulate(args) -> Outcome:
    digests = _digest([args.circuit])
    circuit = io.load_circuit(args.circuit, digests)
    final = accumulate(circuit, method=args.method)
    trace = per_step_trace(circuit)
    results = {
        "trace": [[name, value] for name, value in trace],
        "perfection": final.perfection,
        "dominated_term": dominated_term(circuit),
        "channel": final.as_dict(cutoff=1e-15),
    }
    return Outcome(
        results,
        inputs=digests,
        settings={"method": args.method},
        csv_writer=lambda path: io.write_trace_csv(trace, path),
        summary="P_I trace: " + ", ".join(f"{v:.6f}" for _, v in trace),
    )


def cmd_sspc_verify(args) -> Outcome:
    basis = args.basis.upper()
    tol = args.tol if args.tol is not None else 1e-9
    inputs = {}
    if args.matrix:
        rep = io.load_channel(args.matrix)
        if rep.kind != "unitary":
            raise InvalidArgument("--matrix must hold a 'unitary' channel file")
        u = np.array(rep.payload)
        inputs = _digest([args.matrix])
    else:
        u = sspc_unitary(basis)
    checks = {
        "unitarity_residual": unitarity_residual(u),
        "involution_residual": float(np.max(np.abs(u @ u - np.eye(8)))),
        "decomposed_product_deviation": float(
            np.max(np.abs(sequence_product(decomposed_parity_circuit(basis)) - u))
        ),
        "clifford": is_clifford(u),
    }
    report = verify_parity_semantics(u, basis, args.trials, args.seed, tol, raise_on_failure=False)
    checks["semantics"] = report.to_dict()
    ok = report.passed and checks["unitarity_residual"] <= 1e-12
    if not args.matrix:
        ok = ok and checks["decomposed_product_deviation"] <= 1e-12 and checks["involution_residual"] <= 1e-12
    if not report.passed:
        checks["witness"] = report.witness
    checks["passed"] = bool(ok)
    return Outcome(
        checks, ok=ok, inputs=inputs,
        settings={"basis": basis, "trials": args.trials, "seed": args.seed, "tol": tol},
        summary=f"{basis}: {'pass' if ok else 'FAIL'} (max deviation {report.max_deviation:.2e})",
    )


def cmd_compare(args) -> Outcome:
    dec = NoiseSpec(args.model, args.decomposed_p)
    single = NoiseSpec(args.model, args.sspc_p)
    meas = NoiseSpec(args.model, args.measurement_p) if args.measurement_p is not None else None
    rep = compare_decomposed_vs_sspc(dec, single, meas)
    results = rep.to_dict()
    if args.fidelity is not None:
        results["calibrated_p"] = calibrate_p(args.fidelity, args.model, 3)
    return Outcome(
        results,
        settings={"model": args.model, "decomposed_p": args.decomposed_p, "sspc_p": args.sspc_p,
                  "measurement_p": args.measurement_p},
        summary=f"decomposed P_I = {rep.decomposed_perfection:.6f}, SSPC P_I = {rep.sspc_perfection:.6f}",
    )


def cmd_clock(args) -> Outcome:
    sol = clock_solve(args.ta, args.tb, (args.a_odd, args.b_odd), args.err, args.bound)
    results = {"solution": sol.to_dict()}
    if any(v is not None for v in (args.ref_a, args.ref_b, args.ref_total)):
        results["reference_check"] = compare_with_reference(sol, args.ref_a, args.ref_b, args.ref_total)
    return Outcome(
        results,
        settings={"ta": args.ta, "tb": args.tb, "a_odd": args.a_odd, "b_odd": args.b_odd,
                  "error": args.err, "bound": args.bound},
        summary=f"a={sol.a} b={sol.b} total={sol.total_time:.4f} us",
    )


def _target(name: str):
    if name.lower() in ("xx", "zz"):
        return sspc_unitary(name), {}
    rep = io.load_channel(name)
    if rep.kind != "unitary":
        raise InvalidArgument("--target file must hold a 'unitary' channel")
    return np.array(rep.payload), _digest([name])


def cmd_grape(args) -> Outcome:
    spec = io.load_spin_spec(args.spec)
    target, inputs = _target(args.target)
    inputs.update(_digest([args.spec]))
    opts = GrapeOptions(
        n_slots=args.n_slots, dt=args.dt, max_iter=args.max_iter, tol=args.fidelity,
        modulated=args.modulated, seed=args.seed, method=args.method,
    )
    res = grape_optimize(target, spec, opts)
    names = [c.name for c in control_operators(spec, opts.modulated)]
    if args.schedule_out:
        io.write_schedule_csv(res.schedule, args.schedule_out, names)
    results = {
        "fidelity": res.fidelity,
        "iterations": res.iterations,
        "converged": res.converged,
        "history": res.history,
        "controls": names,
        "total_time_ns": res.schedule.total_time,
    }
    return Outcome(
        results, ok=res.converged, inputs=inputs,
        settings={k: getattr(opts, k) for k in ("n_slots", "dt", "max_iter", "tol", "modulated", "seed", "method")},
        csv_writer=lambda path: io.write_schedule_csv(res.schedule, path, names),
        summary=f"fidelity = {res.fidelity:.6f} after {res.iterations} iterations",
    )


def cmd_spectrum(args) -> Outcome:
    schedule = io.read_schedule_csv(args.schedule)
    sp = pulse_spectrum(schedule, args.control)
    results = {"resolution_mhz": sp.resolution, "peaks": [[f, m] for f, m in sp.peaks]}
    if args.spec:
        spec = io.load_spin_spec(args.spec)
        lines = [t.frequency for t in transition_frequencies(drift_hamiltonian(spec))]
        lines.append(spec.combination_line)
        line_bins = np.rint(np.array(lines) / sp.resolution)
        results["peak_line_bin_distance"] = [
            float(np.min(np.abs(line_bins - np.rint(f / sp.resolution)))) for f, _ in sp.peaks
        ]
    return Outcome(
        results, inputs=_digest([args.schedule] + ([args.spec] if args.spec else [])),
        settings={"control": args.control},
        csv_writer=lambda path: io.write_spectrum_csv(sp, path),
        summary="peaks (MHz): " + ", ".join(f"{f:.3f}" for f, _ in sp.peaks),
    )


def cmd_convert(args) -> Outcome:
    rep = io.load_channel(args.input)
    out = convert(rep, args.to)
    back = convert(out, rep.kind) if rep.kind != "unitary" else None
    results = {
        "channel": io.channel_to_dict(out),
        "action_distance": action_distance(rep, out),
    }
    if back is not None:
        results["round_trip_action_distance"] = action_distance(rep, back)
    return Outcome(results, inputs=_digest([args.input]), settings={"to": args.to},
                   summary=f"{rep.kind} -> {out.kind}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="verification tolerance")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", type=Path, default=None, help="output file (stdout if omitted)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="sspc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="gate error analysis from PTMs")
    p.add_argument("--ideal", required=True)
    p.add_argument("--experimental", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("accumulate", parents=[common], help="perfection rate through a circuit")
    p.add_argument("circuit")
    p.add_argument("--method", choices=("transform", "direct"), default="transform")
    p.set_defaults(func=cmd_accumulate)

    p = sub.add_parser("sspc-verify", parents=[common], help="check a parity-check unitary")
    p.add_argument("--basis", choices=("xx", "zz", "XX", "ZZ"), required=True)
    p.add_argument("--matrix", default=None, help="unitary file to check instead of the built-in one")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_sspc_verify)

    p = sub.add_parser("compare", parents=[common], help="decomposed vs single-step noise")
    p.add_argument("--decomposed-p", type=float, required=True)
    p.add_argument("--sspc-p", type=float, required=True)
    p.add_argument("--model", choices=MODELS, default="phase_flip")
    p.add_argument("--measurement-p", type=float, default=None)
    p.add_argument("--fidelity", type=float, default=None, help="also calibrate p to this 3-qubit fidelity")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("clock", parents=[common], help="commensurate clock solver")
    p.add_argument("--ta", type=float, required=True, help="period a (ns)")
    p.add_argument("--tb", type=float, required=True, help="period b (ns)")
    p.add_argument("--a-odd", action="store_true")
    p.add_argument("--b-odd", action="store_true")
    p.add_argument("--err", type=float, default=0.01)
    p.add_argument("--bound", type=int, default=100_000)
    p.add_argument("--ref-a", type=int, default=None)
    p.add_argument("--ref-b", type=int, default=None)
    p.add_argument("--ref-total", type=float, default=None, help="quoted total time (us)")
    p.set_defaults(func=cmd_clock)

    p = sub.add_parser("grape", parents=[common], help="optimise a control pulse")
    p.add_argument("--spec", required=True)
    p.add_argument("--target", required=True, help="xx, zz or a unitary file")
    p.add_argument("--n-slots", type=int, default=600)
    p.add_argument("--dt", type=float, default=10.0)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--fidelity", type=float, default=0.99, help="target fidelity")
    p.add_argument("--modulated", action="store_true")
    p.add_argument("--method", choices=("lbfgsb", "ascent"), default="lbfgsb")
    p.add_argument("--schedule-out", type=Path, default=None)
    p.set_defaults(func=cmd_grape)

    p = sub.add_parser("spectrum", parents=[common], help="spectrum of a schedule CSV")
    p.add_argument("schedule")
    p.add_argument("--control", type=int, default=None)
    p.add_argument("--spec", default=None, help="spin spec for matching peaks to lines")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("convert", parents=[common], help="convert a channel file")
    p.add_argument("input")
    p.add_argument("--to", choices=KINDS, required=True)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = args.func(args)
    except (InvalidArgument, PhysicalityError, ImpossibleOutcome) as exc:
        print(f"sspc {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoSolution, VerificationFailure) as exc:
        print(f"sspc {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL

    if args.format == "csv":
        if outcome.csv_writer is None:
            print(f"sspc {args.command}: no CSV form for this command", file=sys.stderr)
            return EXIT_INPUT
        if args.out is None:
            print(f"sspc {args.command}: --format csv needs --out", file=sys.stderr)
            return EXIT_INPUT
        outcome.csv_writer(args.out)
    else:
        report = io.make_report(args.command, outcome.results, outcome.inputs, outcome.settings)
        text = io.dumps(report)
        if args.out is None:
            sys.stdout.write(text)
        else:
            args.out.write_text(text, encoding="utf-8")
    print(outcome.summary, file=sys.stderr)
    return EXIT_OK if outcome.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
