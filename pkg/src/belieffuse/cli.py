"""belieffuse command line: combine, validate, bench, export-qasm."""
from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from .circuits import (
    QasmError,
    build_qadrc_circuit,
    build_qdrc_circuit,
    circuit_distribution,
    export_qasm,
    parse_qasm,
    run_fusion,
)
from .evidence import (
    TOL,
    Backend,
    CBBA,
    InvalidMassError,
    Mode,
    TotalConflictError,
    combine_drc,
    decide,
    max_abs_diff,
    modulus_normalized,
    validate,
)
from .fusion import CLI_BACKENDS, fold
from .generators import frame_of_size, random_bba
from .io import EvidenceFormatError, load_evidence
from .qsim import configure_threads
from .stateprep import p_transform

EXIT_OK = 0
EXIT_FAIL = 1  # cross-check or round-trip mismatch
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_CONFLICT = 4

BENCH_MAX_N = 8


def _err(msg: str) -> None:
    print(f"belieffuse: {msg}", file=sys.stderr)


def _fmt_mass(v) -> str:
    v = complex(v)
    if v.imag == 0.0:
        return f"{v.real:.6f}"
    return f"{v.real:.6f}{v.imag:+.6f}i"


def _mass_table(result) -> list[str]:
    frame = result.frame
    rows = [(frame.label(k), v) for k, v in sorted(result.combined.masses.items())]
    width = max([len("subset")] + [len(label) for label, _ in rows])
    return [f"{'subset':<{width}}  mass"] + [f"{label:<{width}}  {_fmt_mass(v)}" for label, v in rows]


def _load_checked(path) -> tuple:
    """Load and validate an evidence file; returns (evidence, exit code or None)."""
    try:
        evidence, _ = load_evidence(path, strict=True)
    except EvidenceFormatError as exc:
        _err(f"{path}: {exc}")
        return None, EXIT_PARSE
    bad = False
    for src in evidence.sources:
        for finding in validate(src.masses):
            _err(f"source {src.name!r}: {finding}")
            bad = True
    return evidence, (EXIT_INVALID if bad else None)


def _cross_checks(sources: list[CBBA], primary, all_real: bool) -> list[tuple]:
    """Rows (backend label, result or error text, gated) compared against the primary result."""
    rows = []
    normalized = [modulus_normalized(m) for m in sources]
    candidates = [
        ("classical-drc(|M|)", lambda: fold(normalized, Backend.CLASSICAL_DRC), "modulus"),
        ("qadrc", lambda: fold(sources, Backend.QADRC), "modulus"),
        ("qdrc", lambda: fold(sources, Backend.QDRC), "modulus"),
        ("classical-cdrc", lambda: fold(sources, Backend.CLASSICAL_CDRC), "complex"),
    ]
    primary_semantics = "complex" if primary.backend is Backend.CLASSICAL_CDRC else "modulus"
    for label, run, semantics in candidates:
        gated = primary.mode.exact and (all_real or semantics == primary_semantics)
        try:
            rows.append((label, run(), gated))
        except (TotalConflictError, InvalidMassError) as exc:
            rows.append((label, str(exc), gated))
    return rows


def build_report(evidence, result, cross_rows) -> tuple[str, bool]:
    lines = [
        "belieffuse fusion report",
        f"frame: {','.join(evidence.frame.elements)}",
        f"sources: {', '.join(s.name for s in evidence.sources)}",
        f"backend: {result.backend}",
        f"mode: {result.mode}",
        f"conflict_K: {_fmt_mass(result.conflict)}",
        f"decision: {decide(result)}",
        "",
        *_mass_table(result),
        "",
        f"cross-check (tolerance {TOL:.0e})",
        f"{'backend':<20}{'conflict_K':<22}{'max_abs_diff':<14}status",
    ]
    failed = False
    cdrc = None
    for label, other, gated in cross_rows:
        if isinstance(other, str):
            status = "FAIL" if gated else "INFO"
            failed |= gated
            lines.append(f"{label:<20}{'-':<22}{'-':<14}{status} ({other})")
            continue
        if other.backend is Backend.CLASSICAL_CDRC:
            cdrc = other
        diff = max_abs_diff(result.combined, other.combined)
        diff = max(diff, abs(complex(result.conflict) - complex(other.conflict)))
        if gated:
            ok = diff <= TOL
            failed |= not ok
            status = "PASS" if ok else "FAIL"
        else:
            status = "INFO"
        lines.append(f"{label:<20}{_fmt_mass(other.conflict):<22}{diff:<14.3e}{status}")
    if cdrc is not None and not cdrc.combined.is_real and result.backend is not Backend.CLASSICAL_CDRC:
        lines += ["", "classical-cdrc masses (complex rule; quantum paths fuse moduli only)", *_mass_table(cdrc)]
    return "\n".join(lines) + "\n", failed


def cmd_combine(args) -> int:
    evidence, code = _load_checked(args.input)
    if code is not None:
        return code
    if len(evidence.sources) < 2:
        _err(f"{args.input}: need at least two sources, found {len(evidence.sources)}")
        return EXIT_INVALID
    backend = CLI_BACKENDS[args.backend]
    mode = Mode() if args.mode == "exact" else Mode(args.shots, args.seed)
    sources = [s.masses for s in evidence.sources]
    t0 = time.perf_counter_ns()
    try:
        result = fold(sources, backend, mode)
    except TotalConflictError as exc:
        _err(f"total conflict: {exc}")
        return EXIT_CONFLICT
    except InvalidMassError as exc:
        _err(str(exc))
        return EXIT_INVALID
    elapsed = time.perf_counter_ns() - t0
    all_real = all(m.is_real for m in sources)
    report, failed = build_report(evidence, result, _cross_checks(sources, result, all_real))
    if args.output:
        Path(args.output).write_text(report)
    else:
        sys.stdout.write(report)
    if args.timings:
        print(f"{backend}: {elapsed / 1e6:.3f} ms", file=sys.stderr)
    if failed:
        _err("exact backends disagree; see cross-check section")
        return EXIT_FAIL
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        evidence, findings = load_evidence(args.input, strict=False)
    except EvidenceFormatError as exc:
        print(f"{args.input}: {exc}")
        return EXIT_PARSE
    for src in evidence.sources:
        findings += [f"source {src.name!r}: {f}" for f in validate(src.masses)]
    if len(evidence.sources) < 2:
        findings.append(f"need at least two sources to combine, found {len(evidence.sources)}")
    if findings:
        for f in findings:
            print(f)
        return EXIT_INVALID
    print("OK")
    return EXIT_OK


def bench_rows(n_min: int, n_max: int, trials: int, seed: int) -> list[dict]:
    if not 1 <= n_min <= n_max <= BENCH_MAX_N:
        raise ValueError(f"need 1 <= n-min <= n-max <= {BENCH_MAX_N}, got {n_min}..{n_max}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    seeds = np.random.SeedSequence(seed).spawn(n_max - n_min + 1)
    for n, ss in zip(range(n_min, n_max + 1), seeds):
        frame = frame_of_size(n)
        rng = np.random.default_rng(ss)
        pairs = [(random_bba(frame, rng), random_bba(frame, rng)) for _ in range(trials)]
        for backend in (Backend.CLASSICAL_DRC, Backend.QADRC, Backend.QDRC):
            if n == n_min and backend is not Backend.CLASSICAL_DRC:
                run_fusion(*pairs[0], backend)  # warm-up: JIT cache load
            elapsed, gates = [], []
            for m1, m2 in pairs:
                t0 = time.perf_counter_ns()
                if backend is Backend.CLASSICAL_DRC:
                    combine_drc(m1, m2)
                else:
                    run_fusion(m1, m2, backend)
                elapsed.append(time.perf_counter_ns() - t0)
                if backend is Backend.QDRC:
                    gates.append(len(build_qdrc_circuit(p_transform(m1), p_transform(m2))))
                elif backend is Backend.QADRC:
                    gates.append(len(build_qadrc_circuit(p_transform(m1), p_transform(m2))))
            qubits = {Backend.CLASSICAL_DRC: 0, Backend.QADRC: 2 * n, Backend.QDRC: 3 * n}[backend]
            rows.append(
                {
                    "N": n,
                    "backend": str(backend),
                    "mean_ns": int(round(float(np.mean(elapsed)))),
                    "gate_count": int(round(float(np.mean(gates)))) if gates else 0,
                    "qubit_count": qubits,
                }
            )
    return rows


def cmd_bench(args) -> int:
    try:
        rows = bench_rows(args.n_min, args.n_max, args.trials, args.seed)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INVALID
    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["N", "backend", "mean_ns", "gate_count", "qubit_count"])
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def cmd_export_qasm(args) -> int:
    evidence, code = _load_checked(args.input)
    if code is not None:
        return code
    if len(evidence.sources) != 2:
        _err(f"QASM export is pairwise only; {args.input} has {len(evidence.sources)} sources")
        return EXIT_INVALID
    p1, p2 = (p_transform(s.masses) for s in evidence.sources)
    build = build_qdrc_circuit if args.backend == "qdrc" else build_qadrc_circuit
    circuit = build(p1, p2)
    text = export_qasm(circuit)
    try:
        reparsed = parse_qasm(text)
    except QasmError as exc:
        _err(f"exported QASM does not re-parse: {exc}")
        return EXIT_FAIL
    diff = float(np.max(np.abs(circuit_distribution(reparsed) - circuit_distribution(circuit))))
    if diff > TOL:
        _err(f"re-simulated QASM differs from the in-memory circuit by {diff:.3e}")
        return EXIT_FAIL
    Path(args.output).write_text(text)
    print(
        f"wrote {args.output}: {circuit.n_qubits} qubits, {len(circuit)} gates, "
        f"{len(circuit.measured_qubits)} measured; round-trip max diff {diff:.1e}"
    )
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="belieffuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("combine", help="fuse all sources of an evidence file")
    p.add_argument("--input", required=True)
    p.add_argument("--backend", choices=list(CLI_BACKENDS), default="qdrc")
    p.add_argument("--mode", choices=["exact", "shots"], default="exact")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--timings", action="store_true", help="print wall-clock time to stderr")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("validate", help="check an evidence file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="time the backends on random BBAs")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-qasm", help="write the fusion circuit of a two-source file")
    p.add_argument("--input", required=True)
    p.add_argument("--backend", choices=["qadrc", "qdrc"], default="qdrc")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export_qasm)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if getattr(args, "mode", None) == "shots" and args.shots < 1:
        _err("--shots must be >= 1")
        return EXIT_PARSE
    configure_threads()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
