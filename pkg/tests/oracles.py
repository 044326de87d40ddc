"""Reference implementations that share no code path with the package.

The DRC oracle works on frozensets instead of bitmasks; the circuit oracle
builds full Kronecker-product matrices instead of running the in-place kernels.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def nested_loop_drc(m1: dict, m2: dict):
    """Dempster's rule over {frozenset: mass}; returns (K, {frozenset: mass})."""
    joint = {}
    conflict = 0
    for b, vb in m1.items():
        for c, vc in m2.items():
            a = b & c
            if not a:
                conflict += vb * vc
            else:
                joint[a] = joint.get(a, 0) + vb * vc
    return conflict, {a: v / (1 - conflict) for a, v in joint.items()}


def as_sets(cbba) -> dict:
    return {cbba.frame.decode(k): v for k, v in cbba.masses.items()}


_I = np.eye(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_P0 = np.diag([1, 0]).astype(complex)
_P1 = np.diag([0, 1]).astype(complex)


def _ry(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _embed(ops: dict, n: int) -> np.ndarray:
    # little-endian: qubit 0 is the rightmost Kronecker factor
    out = np.eye(1)
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, _I))
    return out


def _controlled(controls, target, u, n):
    dim = 1 << n
    total = np.zeros((dim, dim), dtype=complex)
    for bits in itertools.product((0, 1), repeat=len(controls)):
        ops = {c: (_P1 if b else _P0) for c, b in zip(controls, bits)}
        if all(bits):
            ops[target] = u
        total += _embed(ops, n)
    return total


def dense_matrix(gate, n: int) -> np.ndarray:
    name = type(gate).__name__
    if name == "X":
        return _embed({gate.target: _X}, n)
    if name == "RY":
        return _embed({gate.target: _ry(gate.theta)}, n)
    if name == "CNOT":
        return _controlled([gate.control], gate.target, _X, n)
    if name == "CRY":
        return _controlled([gate.control], gate.target, _ry(gate.theta), n)
    if name == "Toffoli":
        return _controlled([gate.control1, gate.control2], gate.target, _X, n)
    raise TypeError(name)


def dense_simulate(circuit, state=None) -> np.ndarray:
    n = circuit.n_qubits
    if state is None:
        state = np.zeros(1 << n, dtype=complex)
        state[0] = 1
    for g in circuit.gates:
        state = dense_matrix(g, n) @ state
    return state


def enumerate_marginal(amps: np.ndarray, qubits) -> np.ndarray:
    n = int(amps.size).bit_length() - 1
    out = np.zeros(1 << len(qubits))
    for idx in range(1 << n):
        j = sum(((idx >> q) & 1) << b for b, q in enumerate(qubits))
        out[j] += abs(amps[idx]) ** 2
    return out
