"""Frames of discernment, (complex) mass functions and the classical combination rules.

Subsets of a frame are stored as integer bitmasks: element ``k`` of the frame
owns bit ``k``.  Intersection is therefore ``b & c`` and the empty set is ``0``,
which is the same convention the quantum circuits use for basis labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union

TOL = 1e-9

Number = Union[int, float, complex]


class FrameMismatchError(ValueError):
    """Raised when an element is unknown to a frame or two frames differ."""


class InvalidMassError(ValueError):
    """Raised when a mass function violates the (C)BBA axioms."""


class TotalConflictError(ArithmeticError):
    """Dempster normalisation is undefined because the conflict is (numerically) total."""


@dataclass(frozen=True)
class Frame:
    elements: tuple[str, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise ValueError("a frame needs at least one element")
        for name in elements:
            if not isinstance(name, str) or not name:
                raise ValueError(f"frame element names must be non-empty strings, got {name!r}")
            if "," in name:
                raise ValueError(f"frame element {name!r} may not contain ','")
        if len(set(elements)) != len(elements):
            raise ValueError(f"duplicate frame elements in {elements}")

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def full(self) -> int:
        """Bitmask of the whole frame (the vacuous focal element)."""
        return (1 << self.size) - 1

    def encode(self, members: Iterable[str]) -> int:
        code = 0
        for name in members:
            try:
                code |= 1 << self.elements.index(name)
            except ValueError:
                raise FrameMismatchError(f"{name!r} is not an element of frame {self.elements}") from None
        return code

    def decode(self, code: int) -> frozenset[str]:
        if not 0 <= code <= self.full:
            raise FrameMismatchError(f"subset code {code} out of range for a frame of size {self.size}")
        return frozenset(name for k, name in enumerate(self.elements) if code >> k & 1)

    def label(self, code: int) -> str:
        """Comma-joined member names in frame order; ``""`` for the empty set."""
        if not 0 <= code <= self.full:
            raise FrameMismatchError(f"subset code {code} out of range for a frame of size {self.size}")
        return ",".join(name for k, name in enumerate(self.elements) if code >> k & 1)

    def parse_label(self, key: str) -> int:
        """Inverse of :meth:`label`.  Names must appear in frame order without repeats."""
        names = key.split(",")
        code = 0
        last = -1
        for pos, name in enumerate(names):
            name = name.strip()
            if name not in self.elements:
                raise FrameMismatchError(f"unknown element {name!r} at position {pos} of key {key!r}")
            k = self.elements.index(name)
            if k <= last:
                raise FrameMismatchError(
                    f"element {name!r} at position {pos} of key {key!r} breaks frame order {','.join(self.elements)}"
                )
            last = k
            code |= 1 << k
        return code


def subset_encode(frame: Frame, members: Iterable[str]) -> int:
    return frame.encode(members)


def subset_decode(frame: Frame, code: int) -> frozenset[str]:
    return frame.decode(code)


@dataclass(frozen=True)
class CBBA:
    """Complex basic belief assignment: subset code -> complex mass.

    Construction does not enforce the axioms; call :func:`validate` (or
    :func:`require_valid`) for that.
    """

    frame: Frame
    masses: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "masses", {int(k): complex(v) for k, v in dict(self.masses).items()})

    @classmethod
    def from_labels(cls, frame: Frame, masses: Mapping[str, Number]):
        return cls(frame, {frame.parse_label(k): v for k, v in masses.items()})

    @classmethod
    def vacuous(cls, frame: Frame):
        return cls(frame, {frame.full: 1.0})

    @property
    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v in self.masses.values())

    def mass(self, subset: int | Iterable[str]) -> complex:
        code = subset if isinstance(subset, int) else self.frame.encode(subset)
        return self.masses.get(code, 0j)

    def labelled(self) -> dict[str, complex]:
        return {self.frame.label(k): v for k, v in sorted(self.masses.items())}


class BBA(CBBA):
    """Real-valued mass function (a CBBA whose imaginary parts are all zero)."""

    def __post_init__(self):
        masses = {}
        for k, v in dict(self.masses).items():
            v = complex(v)
            if v.imag != 0.0:
                raise InvalidMassError(f"BBA mass for subset {k} has imaginary part {v.imag}")
            masses[int(k)] = v.real
        object.__setattr__(self, "masses", masses)

    @property
    def is_real(self) -> bool:
        return True

    def mass(self, subset: int | Iterable[str]) -> float:
        code = subset if isinstance(subset, int) else self.frame.encode(subset)
        return self.masses.get(code, 0.0)

    def labelled(self) -> dict[str, float]:
        return {self.frame.label(k): v for k, v in sorted(self.masses.items())}


def as_bba(cbba: CBBA) -> BBA:
    """View a real-valued CBBA as a BBA; raises if any imaginary part is non-zero."""
    if isinstance(cbba, BBA):
        return cbba
    return BBA(cbba.frame, cbba.masses)


def validate(cbba: CBBA, tol: float = TOL) -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    findings = []
    frame = cbba.frame
    for code, v in sorted(cbba.masses.items()):
        if code == 0:
            findings.append(f"mass assigned to the empty set: {_fmt(v)}")
            continue
        if code < 0 or code > frame.full:
            findings.append(f"subset code {code} out of range [1, {frame.full}]")
            continue
        name = frame.label(code)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            findings.append(f"non-finite mass for {{{name}}}: {_fmt(v)}")
        elif abs(v) > 1 + tol:
            findings.append(f"|M({{{name}}})| = {abs(v):.6g} > 1 for mass {_fmt(v)}")
        if isinstance(cbba, BBA) or v.imag == 0.0:
            if v.real < -tol:
                findings.append(f"negative mass for {{{name}}}: {v.real:.6g}")
    total = _csum(cbba.masses.values())
    if abs(total.real - 1.0) > tol or abs(total.imag) > tol:
        findings.append(f"masses sum to {_fmt(total)}, expected 1")
    return findings


def require_valid(cbba: CBBA, name: str = "mass function") -> None:
    findings = validate(cbba)
    if findings:
        raise InvalidMassError(f"{name} is invalid: " + "; ".join(findings))


def modulus_mass(cbba: CBBA) -> dict[int, float]:
    return {k: abs(v) for k, v in cbba.masses.items()}


def modulus_normalized(cbba: CBBA) -> BBA:
    """The BBA ``|M(A)| / sum |M|``; what the quantum pipelines actually fuse."""
    mods = modulus_mass(cbba)
    total = math.fsum(mods.values())
    if total == 0.0:
        raise InvalidMassError("all masses are zero")
    return BBA(cbba.frame, {k: v / total for k, v in mods.items()})


class Backend(str, Enum):
    CLASSICAL_DRC = "classical-drc"
    CLASSICAL_CDRC = "classical-cdrc"
    QADRC = "qadrc"
    QDRC = "qdrc"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Mode:
    """``Mode()`` is exact evaluation; ``Mode(shots=n, seed=s)`` emulates n measurements."""

    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")

    @property
    def exact(self) -> bool:
        return self.shots is None

    def __str__(self):
        return "exact" if self.exact else f"shots({self.shots}, seed={self.seed})"


EXACT = Mode()


@dataclass(frozen=True)
class FusionResult:
    combined: CBBA
    conflict: complex | float
    backend: Backend
    mode: Mode = EXACT

    @property
    def frame(self) -> Frame:
        return self.combined.frame

    def mass(self, subset) -> complex | float:
        return self.combined.mass(subset)


def _csum(values: Iterable[complex]) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _fmt(v: complex) -> str:
    if v.imag == 0.0:
        return f"{v.real:.6g}"
    return f"{v.real:.6g}{v.imag:+.6g}i"


def _check_frames(m1: CBBA, m2: CBBA) -> None:
    if m1.frame != m2.frame:
        raise FrameMismatchError(f"frames differ: {m1.frame.elements} vs {m2.frame.elements}")


def _conjunctive(m1: CBBA, m2: CBBA) -> dict[int, list[complex]]:
    # products grouped by intersection; summed later with fsum so argument order
    # never changes the result
    terms: dict[int, list[complex]] = {}
    for b, vb in m1.masses.items():
        for c, vc in m2.masses.items():
            terms.setdefault(b & c, []).append(vb * vc)
    return terms


def combine_drc(m1: CBBA, m2: CBBA) -> FusionResult:
    """Dempster's rule for two real BBAs over the same frame."""
    _check_frames(m1, m2)
    m1, m2 = as_bba(m1), as_bba(m2)
    terms = _conjunctive(m1, m2)
    conflict = math.fsum(v.real for v in terms.pop(0, []))
    if conflict >= 1.0 - TOL:
        raise TotalConflictError(f"conflict K = {conflict!r}; Dempster's rule is undefined")
    norm = 1.0 - conflict
    combined = {a: math.fsum(v.real for v in vs) / norm for a, vs in sorted(terms.items())}
    return FusionResult(BBA(m1.frame, combined), conflict, Backend.CLASSICAL_DRC)


def combine_cdrc(m1: CBBA, m2: CBBA) -> FusionResult:
    """Complex Dempster rule: complex products, complex conflict, division by ``1 - K``."""
    _check_frames(m1, m2)
    terms = _conjunctive(m1, m2)
    conflict = _csum(terms.pop(0, []))
    norm = 1.0 - conflict
    if abs(norm) <= TOL:
        raise TotalConflictError(f"|1 - K| = {abs(norm)!r} with K = {conflict!r}; complex rule is singular")
    combined = {a: _csum(vs) / norm for a, vs in sorted(terms.items())}
    return FusionResult(CBBA(m1.frame, combined), conflict, Backend.CLASSICAL_CDRC)


def decide(result: FusionResult | CBBA) -> str:
    """Label of the subset with the largest mass (modulus for complex masses).

    Ties go to the lowest subset code.
    """
    combined = result.combined if isinstance(result, FusionResult) else result
    if not combined.masses:
        raise ValueError("cannot decide on an empty mass function")
    best_code, best = None, -math.inf
    for code in sorted(combined.masses):
        score = abs(combined.masses[code])
        if score > best:
            best_code, best = code, score
    return combined.frame.label(best_code)


def max_abs_diff(a: CBBA, b: CBBA) -> float:
    """Largest per-subset absolute difference, treating missing subsets as zero mass."""
    keys = set(a.masses) | set(b.masses)
    return max((abs(a.mass(k) - b.mass(k)) for k in keys), default=0.0)
