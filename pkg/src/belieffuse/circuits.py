"""Quantum fusion pipelines.

QADRC loads the two encoded mass functions side by side (2N qubits), measures
the joint distribution and intersects outcomes classically.  QDRC adds an
output register and one Toffoli per frame element, so the measured output
register already holds ``B & C``; the all-zero outcome is the conflict mass.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass

import numpy as np

from .evidence import (
    BBA,
    CBBA,
    EXACT,
    TOL,
    Backend,
    FrameMismatchError,
    FusionResult,
    Mode,
    TotalConflictError,
    require_valid,
)
from .qsim import (
    CNOT,
    CRY,
    RY,
    Circuit,
    Toffoli,
    X,
    marginal_probabilities,
    sample,
    simulate,
)
from .stateprep import AmplitudeVector, p_transform, prepare

# probability allowed on an input register's |0...0> (it encodes the empty set)
EMPTY_INPUT_TOL = 1e-12


@dataclass(frozen=True)
class QdrcLayout:
    n: int

    @property
    def reg1(self) -> range:
        return range(0, self.n)

    @property
    def reg2(self) -> range:
        return range(self.n, 2 * self.n)

    @property
    def reg_out(self) -> range:
        return range(2 * self.n, 3 * self.n)

    @property
    def n_qubits(self) -> int:
        return 3 * self.n


@dataclass(frozen=True)
class QadrcLayout:
    n: int

    @property
    def reg1(self) -> range:
        return range(0, self.n)

    @property
    def reg2(self) -> range:
        return range(self.n, 2 * self.n)

    @property
    def n_qubits(self) -> int:
        return 2 * self.n


def _loads(p1: AmplitudeVector, p2: AmplitudeVector, layout, lower: bool) -> list:
    if p1.n_qubits != p2.n_qubits:
        raise ValueError(f"amplitude vectors differ in size: {p1.n_qubits} vs {p2.n_qubits} qubits")
    if lower:
        return prepare(p1, layout.reg1) + prepare(p2, layout.reg2)
    return [p1.load_gate(layout.reg1.start), p2.load_gate(layout.reg2.start)]


def build_qdrc_circuit(p1: AmplitudeVector, p2: AmplitudeVector, lower: bool = True) -> Circuit:
    layout = QdrcLayout(p1.n_qubits)
    gates = _loads(p1, p2, layout, lower)
    gates += [Toffoli(a, b, t) for a, b, t in zip(layout.reg1, layout.reg2, layout.reg_out)]
    return Circuit(layout.n_qubits, gates, measured=tuple(layout.reg_out))


def build_qadrc_circuit(p1: AmplitudeVector, p2: AmplitudeVector, lower: bool = True) -> Circuit:
    layout = QadrcLayout(p1.n_qubits)
    return Circuit(layout.n_qubits, _loads(p1, p2, layout, lower))


def _distribution(circuit: Circuit, qubits, mode: Mode) -> np.ndarray:
    state = simulate(circuit)
    if mode.exact:
        return marginal_probabilities(state, qubits)
    return sample(state, qubits, mode.shots, mode.seed) / mode.shots


def intersect_joint(joint: np.ndarray, n: int) -> np.ndarray:
    """Fold a joint distribution over (B, C) (index ``B | C << n``) onto ``B & C``."""
    idx = np.arange(joint.size)
    b, c = idx & ((1 << n) - 1), idx >> n
    empty_input = joint[(b == 0) | (c == 0)].sum()
    assert empty_input <= EMPTY_INPUT_TOL, f"input register measured the empty set (p={empty_input:.3g})"
    return np.bincount(b & c, weights=joint, minlength=1 << n)


def run_fusion(
    m1: CBBA,
    m2: CBBA,
    backend: Backend | str = Backend.QDRC,
    mode: Mode = EXACT,
    lower: bool = True,
) -> FusionResult:
    """Fuse two (C)BBAs on the simulator.

    ``lower=False`` applies the amplitude loads directly instead of simulating
    the RY/CNOT preparation gates; the distribution is the same.
    """
    backend = Backend(backend)
    if m1.frame != m2.frame:
        raise FrameMismatchError(f"frames differ: {m1.frame.elements} vs {m2.frame.elements}")
    require_valid(m1, "first source")
    require_valid(m2, "second source")
    n = m1.frame.size
    p1, p2 = p_transform(m1), p_transform(m2)
    if backend is Backend.QDRC:
        circuit = build_qdrc_circuit(p1, p2, lower)
        dist = _distribution(circuit, circuit.measured, mode)
    elif backend is Backend.QADRC:
        circuit = build_qadrc_circuit(p1, p2, lower)
        dist = intersect_joint(_distribution(circuit, range(2 * n), mode), n)
    else:
        raise ValueError(f"run_fusion handles the quantum backends only, not {backend}")

    conflict = float(dist[0])
    kept = float(math.fsum(dist[1:]))
    if conflict >= 1.0 - TOL or kept <= TOL:
        raise TotalConflictError(f"measured conflict K = {conflict!r}; nothing left to renormalise")
    combined = {code: float(p) / kept for code, p in enumerate(dist) if code and p > 0.0}
    return FusionResult(BBA(m1.frame, combined), conflict, backend, mode)


# ---------------------------------------------------------------- OpenQASM 2.0


class QasmError(ValueError):
    pass


def _angle(theta: float) -> str:
    return format(theta, ".17g")


def export_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 using x, ry, cx and ccx only (CRY is expanded)."""
    if not circuit.is_lowered:
        raise QasmError("circuit still contains amplitude-load pseudo-gates; lower it first")
    measured = circuit.measured_qubits
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    if measured:
        lines.append(f"creg c[{len(measured)}];")
    for g in circuit.gates:
        if isinstance(g, X):
            lines.append(f"x q[{g.target}];")
        elif isinstance(g, RY):
            lines.append(f"ry({_angle(g.theta)}) q[{g.target}];")
        elif isinstance(g, CNOT):
            lines.append(f"cx q[{g.control}],q[{g.target}];")
        elif isinstance(g, CRY):
            half = 0.5 * g.theta
            lines += [
                f"ry({_angle(half)}) q[{g.target}];",
                f"cx q[{g.control}],q[{g.target}];",
                f"ry({_angle(-half)}) q[{g.target}];",
                f"cx q[{g.control}],q[{g.target}];",
            ]
        elif isinstance(g, Toffoli):
            lines.append(f"ccx q[{g.control1}],q[{g.control2}],q[{g.target}];")
        else:
            raise QasmError(f"cannot export {g!r}")
    lines += [f"measure q[{q}] -> c[{k}];" for k, q in enumerate(measured)]
    return "\n".join(lines) + "\n"


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(expr: str) -> float:
    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(expr)

    return ev(ast.parse(expr, mode="eval").body)


_QREF = r"\s*(\w+)\s*\[\s*(\d+)\s*\]\s*"
_STMT = {
    "qreg": re.compile(rf"qreg{_QREF}$"),
    "creg": re.compile(rf"creg{_QREF}$"),
    "x": re.compile(rf"x{_QREF}$"),
    "ry": re.compile(rf"ry\s*\(([^)]*)\){_QREF}$"),
    "cry": re.compile(rf"cry\s*\(([^)]*)\){_QREF},{_QREF}$"),
    "cx": re.compile(rf"cx{_QREF},{_QREF}$"),
    "ccx": re.compile(rf"ccx{_QREF},{_QREF},{_QREF}$"),
    "measure": re.compile(rf"measure{_QREF}->{_QREF}$"),
}


def parse_qasm(text: str) -> Circuit:
    """Parse the OpenQASM 2.0 subset written by :func:`export_qasm` (single qreg/creg)."""
    n_qubits = None
    qreg = creg = None
    n_clbits = 0
    gates = []
    measures: dict[int, int] = {}
    seen_header = False

    def fail(lineno, msg):
        raise QasmError(f"line {lineno}: {msg}")

    def qubit(lineno, reg, idx):
        if reg != qreg:
            fail(lineno, f"unknown quantum register {reg!r}")
        if int(idx) >= n_qubits:
            fail(lineno, f"qubit {reg}[{idx}] out of range")
        return int(idx)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            if not seen_header:
                if not re.fullmatch(r"OPENQASM\s+2\.0", stmt):
                    fail(lineno, "expected 'OPENQASM 2.0;' header")
                seen_header = True
                continue
            if stmt.startswith("include"):
                continue
            if stmt.startswith("barrier"):
                continue
            head = stmt.split("(", 1)[0].split()[0]
            pattern = _STMT.get(head)
            if pattern is None:
                fail(lineno, f"unsupported statement {stmt!r}")
            m = pattern.match(stmt)
            if m is None:
                fail(lineno, f"malformed {head} statement {stmt!r}")
            g = m.groups()
            if head == "qreg":
                if qreg is not None:
                    fail(lineno, "only one qreg is supported")
                qreg, n_qubits = g[0], int(g[1])
                continue
            if head == "creg":
                creg, n_clbits = g[0], int(g[1])
                continue
            if qreg is None:
                fail(lineno, "gate before qreg declaration")
            try:
                if head == "x":
                    gates.append(X(qubit(lineno, *g)))
                elif head == "ry":
                    gates.append(RY(qubit(lineno, *g[1:3]), _eval_angle(g[0])))
                elif head == "cry":
                    gates.append(CRY(qubit(lineno, *g[1:3]), qubit(lineno, *g[3:5]), _eval_angle(g[0])))
                elif head == "cx":
                    gates.append(CNOT(qubit(lineno, *g[0:2]), qubit(lineno, *g[2:4])))
                elif head == "ccx":
                    gates.append(Toffoli(qubit(lineno, *g[0:2]), qubit(lineno, *g[2:4]), qubit(lineno, *g[4:6])))
                else:
                    if g[2] != creg or int(g[3]) >= n_clbits:
                        fail(lineno, f"bad classical target {g[2]}[{g[3]}]")
                    measures[int(g[3])] = qubit(lineno, *g[0:2])
            except (SyntaxError, ValueError) as exc:
                if isinstance(exc, QasmError):
                    raise
                fail(lineno, f"cannot evaluate angle in {stmt!r}")
    if n_qubits is None:
        raise QasmError("no qreg declared")
    if sorted(measures) != list(range(len(measures))):
        raise QasmError(f"classical bits {sorted(measures)} are not contiguous from 0")
    measured = tuple(measures[k] for k in range(len(measures))) if measures else None
    return Circuit(n_qubits, gates, measured=measured)


def circuit_distribution(circuit: Circuit) -> np.ndarray:
    """Exact distribution over the circuit's measured qubits."""
    return marginal_probabilities(simulate(circuit), circuit.measured_qubits)
