"""Amplitude encoding of mass functions and RY/CNOT state-preparation circuits.

The preparation is the usual binary-tree scheme: level ``k`` of the tree is a
uniformly controlled RY on qubit ``N-1-k`` whose controls are the ``k`` qubits
above it.  Each multiplexor is lowered with the Gray-code construction, so only
RY and CNOT gates are emitted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evidence import CBBA, InvalidMassError
from .qsim import CNOT, RY, Circuit, LoadAmplitudes


@dataclass(frozen=True)
class AmplitudeVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=float)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        if (amps < 0).any():
            raise ValueError("amplitudes must be non-negative")
        norm = math.fsum(amps**2)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"amplitudes must have unit 2-norm, got squared norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_probabilities(cls, probs: Sequence[float]) -> "AmplitudeVector":
        probs = np.asarray(probs, dtype=float)
        return cls(len(probs).bit_length() - 1, np.sqrt(probs))

    def load_gate(self, start: int = 0) -> LoadAmplitudes:
        return LoadAmplitudes(start, tuple(self.amps))


@dataclass(frozen=True)
class AngleTree:
    """``levels[k]`` holds the ``2**k`` RY angles of tree level ``k``; node ``j`` is
    the branch where the ``k`` already-decided qubits spell ``j``."""

    levels: tuple[tuple[float, ...], ...]

    @property
    def n_qubits(self) -> int:
        return len(self.levels)

    def __len__(self):
        return sum(len(level) for level in self.levels)


def p_transform(cbba: CBBA) -> AmplitudeVector:
    """Amplitudes ``sqrt(|M(A_i)| / sum_j |M(A_j)|)``, indexed by subset code.

    Phases are dropped.  For a real BBA this gives ``sqrt(m)``, so squared
    amplitudes reproduce the masses.
    """
    n = cbba.frame.size
    moduli = np.zeros(1 << n)
    for code, v in cbba.masses.items():
        moduli[code] = abs(v)
    total = math.fsum(moduli)
    if total == 0.0:
        raise InvalidMassError("cannot encode a mass function whose masses are all zero")
    return AmplitudeVector(n, np.sqrt(moduli / total))


def build_angle_tree(vec: AmplitudeVector) -> AngleTree:
    n, amps = vec.n_qubits, vec.amps
    levels = []
    for k in range(n):
        halves = amps.reshape(1 << k, 2, 1 << (n - k - 1))
        left = np.sqrt(np.sum(halves[:, 0, :] ** 2, axis=1))
        right = np.sqrt(np.sum(halves[:, 1, :] ** 2, axis=1))
        # arctan2(0, 0) == 0: empty subtrees get no rotation
        levels.append(tuple(float(t) for t in 2.0 * np.arctan2(right, left)))
    return AngleTree(tuple(levels))


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def multiplexed_ry(angles: Sequence[float], controls: Sequence[int], target: int) -> list:
    """RY on ``target`` by ``angles[j]`` when the controls spell ``j`` (controls[b] is bit b)."""
    k = len(controls)
    if len(angles) != 1 << k:
        raise ValueError(f"{len(angles)} angles for {k} controls")
    if all(a == angles[0] for a in angles):
        return [RY(target, float(angles[0]))] if angles[0] != 0.0 else []
    size = 1 << k
    theta = np.asarray(angles, dtype=float)
    gates = []
    for i in range(size):
        g = _gray(i)
        signs = np.array([-1.0 if bin(g & j).count("1") & 1 else 1.0 for j in range(size)])
        alpha = float(signs @ theta) / size
        if alpha != 0.0:
            gates.append(RY(target, alpha))
        flip = g ^ _gray((i + 1) % size)
        gates.append(CNOT(controls[flip.bit_length() - 1], target))
    return gates


def lower_to_gates(tree: AngleTree, qubits: Sequence[int]) -> list:
    qubits = list(qubits)
    n = tree.n_qubits
    if len(qubits) != n:
        raise ValueError(f"angle tree needs {n} qubits, got range of length {len(qubits)}")
    gates = []
    for k, angles in enumerate(tree.levels):
        target = qubits[n - 1 - k]
        controls = qubits[n - k:]
        gates.extend(multiplexed_ry(angles, controls, target))
    return gates


def prepare(vec: AmplitudeVector, qubits: Sequence[int] | None = None) -> list:
    if qubits is None:
        qubits = range(vec.n_qubits)
    return lower_to_gates(build_angle_tree(vec), qubits)


def lower_circuit(circuit: Circuit) -> Circuit:
    """Copy of ``circuit`` with every LoadAmplitudes pseudo-gate expanded."""
    out = Circuit(circuit.n_qubits, measured=circuit.measured)
    for g in circuit.gates:
        if isinstance(g, LoadAmplitudes):
            vec = AmplitudeVector(g.width, np.asarray(g.amps))
            out.extend(prepare(vec, g.qubits))
        else:
            out.append(g)
    return out
