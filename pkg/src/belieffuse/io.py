"""Evidence files.

JSON object with ``"frame"`` (list of names) and ``"sources"`` (list of
``{"name": ..., "masses": {"a,b": [re, im], ...}}``).  Subset keys list
element names in frame order; omitted subsets carry zero mass.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .evidence import CBBA, Frame, FrameMismatchError


class EvidenceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Source:
    name: str
    masses: CBBA


@dataclass(frozen=True)
class EvidenceFile:
    frame: Frame
    sources: tuple[Source, ...]


def _pairs_no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise EvidenceFormatError(f"duplicate key {k!r}")
        out[k] = v
    return out


def parse_evidence(data) -> tuple[EvidenceFile, list[str]]:
    """Build an EvidenceFile, returning subset-key problems as findings.

    Structural problems (wrong types, missing fields, bad mass values) raise
    EvidenceFormatError straight away.
    """
    if not isinstance(data, dict):
        raise EvidenceFormatError("top level must be an object with 'frame' and 'sources'")
    for key in ("frame", "sources"):
        if key not in data:
            raise EvidenceFormatError(f"missing field {key!r}")
    names = data["frame"]
    if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
        raise EvidenceFormatError("'frame' must be an array of strings")
    try:
        frame = Frame(tuple(names))
    except ValueError as exc:
        raise EvidenceFormatError(f"bad frame: {exc}") from None
    if not isinstance(data["sources"], list):
        raise EvidenceFormatError("'sources' must be an array")

    findings = []
    sources = []
    for pos, src in enumerate(data["sources"]):
        where = f"sources[{pos}]"
        if not isinstance(src, dict) or not isinstance(src.get("name"), str) or not isinstance(src.get("masses"), dict):
            raise EvidenceFormatError(f"{where} must be an object with a string 'name' and an object 'masses'")
        name = src["name"]
        masses = {}
        for key, value in src["masses"].items():
            if (
                not isinstance(value, list)
                or len(value) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
            ):
                raise EvidenceFormatError(f"source {name!r}, key {key!r}: mass must be a [re, im] pair of numbers")
            if key.strip() == "":
                findings.append(f"source {name!r}: key {key!r} denotes the empty set")
                continue
            try:
                code = frame.parse_label(key)
            except FrameMismatchError as exc:
                findings.append(f"source {name!r}: {exc}")
                continue
            if code in masses:
                findings.append(f"source {name!r}: key {key!r} repeats subset {frame.label(code)!r}")
                continue
            masses[code] = complex(value[0], value[1])
        sources.append(Source(name, CBBA(frame, masses)))
    return EvidenceFile(frame, tuple(sources)), findings


def loads_evidence(text: str, strict: bool = True) -> tuple[EvidenceFile, list[str]]:
    try:
        data = json.loads(text, object_pairs_hook=_pairs_no_duplicates)
    except json.JSONDecodeError as exc:
        raise EvidenceFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    evidence, findings = parse_evidence(data)
    if strict and findings:
        raise EvidenceFormatError("; ".join(findings))
    return evidence, findings


def load_evidence(path, strict: bool = True) -> tuple[EvidenceFile, list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise EvidenceFormatError(f"cannot read {path}: {exc.strerror}") from None
    return loads_evidence(text, strict)


def to_json(frame: Frame, sources: dict[str, CBBA]) -> str:
    out = {
        "frame": list(frame.elements),
        "sources": [
            {"name": name, "masses": {frame.label(k): [v.real, v.imag] for k, v in sorted(m.masses.items())}}
            for name, m in sources.items()
        ],
    }
    return json.dumps(out, indent=2)
