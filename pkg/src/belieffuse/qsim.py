"""Dense state-vector simulator for X, RY, CNOT, CRY and Toffoli.

Qubit ``k`` is bit ``k`` of the basis index (little-endian).  Kernels mutate
the amplitude array in place and parallelise over disjoint amplitude pairs,
so results do not depend on the thread count.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence, Union

import numba
import numpy as np
from numba import njit, prange

MAX_QUBITS = 26
THREADS_ENV = "BELIEFFUSE_THREADS"

if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    # old system TBB builds only produce a warning; prefer OpenMP
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


def configure_threads(n: int | None = None) -> int:
    """Cap kernel threads at ``n`` (default: $BELIEFFUSE_THREADS; 0 means all available)."""
    if n is None:
        n = int(os.environ.get(THREADS_ENV, "0") or 0)
    available = numba.config.NUMBA_NUM_THREADS
    n = available if n <= 0 else min(n, available)
    numba.set_num_threads(n)
    return n


@njit(nogil=True, cache=True, inline="always")
def _insert_zero(i, target):
    low = i & ((1 << target) - 1)
    return ((i >> target) << (target + 1)) | low


@njit(nogil=True, parallel=True, cache=True)
def _controlled_x(amps, n_qubits, target, cmask):
    tbit = 1 << target
    for i in prange(1 << (n_qubits - 1)):
        i0 = _insert_zero(i, target)
        if i0 & cmask == cmask:
            i1 = i0 | tbit
            t = amps[i0]
            amps[i0] = amps[i1]
            amps[i1] = t


@njit(nogil=True, parallel=True, cache=True)
def _controlled_ry(amps, n_qubits, target, cmask, c, s):
    tbit = 1 << target
    for i in prange(1 << (n_qubits - 1)):
        i0 = _insert_zero(i, target)
        if i0 & cmask == cmask:
            i1 = i0 | tbit
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = c * a0 - s * a1
            amps[i1] = s * a0 + c * a1


@dataclass(frozen=True)
class X:
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class RY:
    target: int
    theta: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class CRY:
    control: int
    target: int
    theta: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class Toffoli:
    control1: int
    control2: int
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control1, self.control2, self.target)


@dataclass(frozen=True)
class LoadAmplitudes:
    """Pseudo-gate: write ``amps`` into qubits ``start .. start+n-1`` (which must be |0...0>).

    Lowered to real gates by :func:`belieffuse.stateprep.lower_circuit`; the
    simulator can also apply it directly.
    """

    start: int
    amps: tuple[float, ...]

    def __post_init__(self):
        amps = tuple(float(a) for a in self.amps)
        object.__setattr__(self, "amps", amps)
        n = len(amps).bit_length() - 1
        if len(amps) < 2 or 1 << n != len(amps):
            raise ValueError(f"amplitude vector length must be a power of two >= 2, got {len(amps)}")

    @property
    def width(self) -> int:
        return len(self.amps).bit_length() - 1

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.width))


Gate = Union[X, RY, CNOT, CRY, Toffoli]
Operation = Union[X, RY, CNOT, CRY, Toffoli, LoadAmplitudes]
GATE_TYPES = (X, RY, CNOT, CRY, Toffoli)


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)
    measured: tuple[int, ...] | None = None  # None: measure every qubit

    def __post_init__(self):
        _check_size(self.n_qubits)
        for g in self.gates:
            check_gate(g, self.n_qubits)
        if self.measured is not None:
            self.measured = tuple(self.measured)
            _check_indices(self.measured, self.n_qubits)

    def append(self, gate: Operation) -> "Circuit":
        check_gate(gate, self.n_qubits)
        self.gates.append(gate)
        return self

    def extend(self, gates) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n_qubits)) if self.measured is None else self.measured

    @property
    def is_lowered(self) -> bool:
        return not any(isinstance(g, LoadAmplitudes) for g in self.gates)

    def count(self, kind: type) -> int:
        return sum(isinstance(g, kind) for g in self.gates)

    def __len__(self):
        return len(self.gates)


class StateVector:
    """Owns a complex128 amplitude array of length ``2**n_qubits``."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        _check_size(n_qubits)
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
            if amplitudes.shape != (1 << n_qubits,):
                raise ValueError(f"expected {1 << n_qubits} amplitudes, got shape {amplitudes.shape}")
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real**2 + self.amplitudes.imag**2

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def init_state(n_qubits: int) -> StateVector:
    return StateVector(n_qubits)


def _check_size(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n_qubits}")


def _check_indices(qubits: Sequence[int], n_qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise IndexError(f"qubit index {q} out of range for {n_qubits} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices {tuple(qubits)}")


def check_gate(gate: Operation, n_qubits: int) -> None:
    if not isinstance(gate, GATE_TYPES + (LoadAmplitudes,)):
        raise TypeError(f"unsupported gate {gate!r}")
    _check_indices(gate.qubits, n_qubits)


def apply_gate(state: StateVector, gate: Operation) -> StateVector:
    """Apply ``gate`` to ``state`` in place and return the same state."""
    check_gate(gate, state.n_qubits)
    amps, n = state.amplitudes, state.n_qubits
    if isinstance(gate, X):
        _controlled_x(amps, n, gate.target, 0)
    elif isinstance(gate, CNOT):
        _controlled_x(amps, n, gate.target, 1 << gate.control)
    elif isinstance(gate, Toffoli):
        _controlled_x(amps, n, gate.target, (1 << gate.control1) | (1 << gate.control2))
    elif isinstance(gate, RY):
        half = 0.5 * gate.theta
        _controlled_ry(amps, n, gate.target, 0, math.cos(half), math.sin(half))
    elif isinstance(gate, CRY):
        half = 0.5 * gate.theta
        _controlled_ry(amps, n, gate.target, 1 << gate.control, math.cos(half), math.sin(half))
    else:
        _load(state, gate)
    return state


def _load(state: StateVector, gate: LoadAmplitudes) -> None:
    n, w, lo = state.n_qubits, gate.width, gate.start
    view = state.amplitudes.reshape(1 << (n - lo - w), 1 << w, 1 << lo)
    stray = np.abs(view[:, 1:, :]).max(initial=0.0)
    if stray > 1e-12:
        raise ValueError(f"load target qubits {gate.qubits} are not in |0...0> (stray amplitude {stray:.3g})")
    base = view[:, 0, :].copy()
    view[...] = base[:, None, :] * np.asarray(gate.amps)[None, :, None]


def simulate(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    if state is None:
        state = init_state(circuit.n_qubits)
    elif state.n_qubits != circuit.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}")
    for g in circuit.gates:
        apply_gate(state, g)
    return state


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Distribution over the listed qubits; bit ``b`` of the outcome index is ``qubits[b]``."""
    qubits = tuple(qubits)
    n = state.n_qubits
    _check_indices(qubits, n)
    if not qubits:
        raise ValueError("need at least one qubit to marginalise onto")
    probs = state.probabilities().reshape((2,) * n)
    # axis n-1-q of the C-ordered reshape holds qubit q
    others = tuple(n - 1 - q for q in range(n) if q not in qubits)
    reduced = probs.sum(axis=others) if others else probs
    kept = sorted(n - 1 - q for q in qubits)  # surviving axes, in order
    order = [kept.index(n - 1 - q) for q in reversed(qubits)]
    return np.ascontiguousarray(np.transpose(reduced, order)).reshape(-1)


def sample(state: StateVector, qubits: Sequence[int], shots: int, seed: int) -> np.ndarray:
    """Multinomial measurement counts over the listed qubits (indexed like the marginal)."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p = marginal_probabilities(state, qubits)
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, p / p.sum())


def gate_matrix(gate: Gate, n_qubits: int) -> np.ndarray:
    """Dense unitary of ``gate`` on ``n_qubits``, built column by column from basis states."""
    dim = 1 << n_qubits
    u = np.empty((dim, dim), dtype=np.complex128)
    for col in range(dim):
        basis = np.zeros(dim, dtype=np.complex128)
        basis[col] = 1.0
        u[:, col] = apply_gate(StateVector(n_qubits, basis), gate).amplitudes
    return u
