import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belieffuse.evidence import (
    BBA,
    CBBA,
    Backend,
    Frame,
    FrameMismatchError,
    FusionResult,
    InvalidMassError,
    TotalConflictError,
    combine_cdrc,
    combine_drc,
    decide,
    modulus_mass,
    subset_decode,
    subset_encode,
    validate,
)
from belieffuse.generators import frame_of_size, random_bba, random_cbba

from oracles import as_sets, nested_loop_drc

ABC = Frame(("a", "b", "c"))
AB = Frame(("a", "b"))


@pytest.mark.parametrize(
    "members, code",
    [({"a"}, 0b001), (set(), 0b000), ({"a", "c"}, 0b101), ({"a", "b", "c"}, 0b111)],
)
def test_subset_encode(members, code):
    assert subset_encode(ABC, members) == code
    assert subset_decode(ABC, code) == members


def test_unknown_element_is_frame_mismatch():
    with pytest.raises(FrameMismatchError):
        subset_encode(ABC, {"z"})


@pytest.mark.parametrize("n", range(1, 7))
def test_encode_round_trip_exhaustive(n):
    frame = frame_of_size(n)
    for r in range(n + 1):
        for members in itertools.combinations(frame.elements, r):
            assert subset_decode(frame, subset_encode(frame, members)) == set(members)


@given(st.sets(st.sampled_from("abc")), st.sets(st.sampled_from("abc")))
def test_encode_is_a_set_homomorphism(a, b):
    assert subset_encode(ABC, a) | subset_encode(ABC, b) == subset_encode(ABC, a | b)
    assert subset_encode(ABC, a) & subset_encode(ABC, b) == subset_encode(ABC, a & b)


def test_labels():
    assert ABC.label(0b101) == "a,c"
    assert ABC.parse_label("a,c") == 0b101
    with pytest.raises(FrameMismatchError, match="position 1"):
        ABC.parse_label("c,a")
    with pytest.raises(FrameMismatchError, match="'z'"):
        ABC.parse_label("a,z")


def test_frame_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        Frame(("a", "a"))
    with pytest.raises(ValueError):
        Frame(())


def test_validate_point_mass_ok():
    assert validate(CBBA.from_labels(AB, {"a": 1 + 0j})) == []


def test_validate_reports_sum():
    findings = validate(CBBA.from_labels(AB, {"a": 0.6, "b": 0.5}))
    assert len(findings) == 1 and "1.1" in findings[0]


def test_validate_reports_modulus():
    m = CBBA.from_labels(AB, {"a": 0.6 + 0.9j, "a,b": 0.4 - 0.9j})
    findings = validate(m)
    # |0.6+0.9i| = sqrt(0.36 + 0.81) = 1.0817
    assert any("1.08167" in f for f in findings)
    assert not any("sum" in f for f in findings)


def test_validate_reports_empty_and_out_of_range():
    m = CBBA(AB, {0: 0.2, 4: 0.3, 1: 0.5})
    findings = validate(m)
    assert any("empty set" in f for f in findings)
    assert any("out of range" in f for f in findings)


def test_validate_negative_bba_mass():
    assert any("negative" in f for f in validate(BBA.from_labels(AB, {"a": 1.2, "b": -0.2})))


def test_bba_rejects_imaginary_parts():
    with pytest.raises(InvalidMassError):
        BBA(AB, {1: 0.5 + 0.1j})


@pytest.mark.parametrize("mass, modulus", [(0.6 + 0.8j, 1.0), (0.5 + 0j, 0.5), (-0.3j, 0.3)])
def test_modulus_mass(mass, modulus):
    assert modulus_mass(CBBA(AB, {1: mass}))[1] == pytest.approx(modulus, abs=1e-15)


# frozen from the nested-loop oracle (tests/oracles.py) on the same inputs
WORKED_M1 = {"a": 0.6, "a,b": 0.4}
WORKED_M2 = {"a": 0.5, "b": 0.3, "a,b": 0.2}
WORKED_K = 0.18
WORKED_COMBINED = {"a": 0.62 / 0.82, "b": 0.12 / 0.82, "a,b": 0.08 / 0.82}


def test_worked_example_oracle_agrees_with_frozen_values():
    m1, m2 = BBA.from_labels(AB, WORKED_M1), BBA.from_labels(AB, WORKED_M2)
    k, combined = nested_loop_drc(as_sets(m1), as_sets(m2))
    assert k == pytest.approx(WORKED_K, abs=1e-15)
    for label, v in WORKED_COMBINED.items():
        assert combined[frozenset(label.split(","))] == pytest.approx(v, abs=1e-15)


def test_combine_drc_worked_example():
    r = combine_drc(BBA.from_labels(AB, WORKED_M1), BBA.from_labels(AB, WORKED_M2))
    assert r.backend is Backend.CLASSICAL_DRC
    assert r.conflict == pytest.approx(WORKED_K, abs=1e-12)
    got = r.combined.labelled()
    assert got.keys() == WORKED_COMBINED.keys()
    for label, v in WORKED_COMBINED.items():
        assert got[label] == pytest.approx(v, abs=1e-12)
    assert round(got["a"], 6) == 0.756098
    assert round(got["b"], 6) == 0.146341
    assert round(got["a,b"], 6) == 0.097561
    assert decide(r) == "a"


def test_combine_drc_total_conflict():
    with pytest.raises(TotalConflictError):
        combine_drc(BBA.from_labels(AB, {"a": 1}), BBA.from_labels(AB, {"b": 1}))


def test_combine_drc_frame_mismatch():
    with pytest.raises(FrameMismatchError):
        combine_drc(BBA.vacuous(AB), BBA.vacuous(ABC))


def test_combine_drc_rejects_complex():
    with pytest.raises(InvalidMassError):
        combine_drc(CBBA(AB, {1: 0.5 + 0.5j, 3: 0.5 - 0.5j}), BBA.vacuous(AB))


def _random_pair(seed, n=None, n_focal=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 5))
    frame = frame_of_size(n)
    k = n_focal or int(rng.integers(1, frame.full + 1))
    return random_bba(frame, rng, k), random_bba(frame, rng, int(rng.integers(1, frame.full + 1)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_drc_matches_nested_loop_oracle(seed):
    m1, m2 = _random_pair(seed)
    k, expected = nested_loop_drc(as_sets(m1), as_sets(m2))
    if k >= 1 - 1e-9:
        with pytest.raises(TotalConflictError):
            combine_drc(m1, m2)
        return
    r = combine_drc(m1, m2)
    assert 0.0 <= r.conflict <= 1.0
    assert abs(r.conflict - k) <= 1e-12
    got = as_sets(r.combined)
    assert got.keys() == expected.keys()
    for a, v in expected.items():
        assert abs(got[a] - v) <= 1e-9
    assert math.fsum(r.combined.masses.values()) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_drc_commutative_exactly(seed):
    m1, m2 = _random_pair(seed)
    try:
        r12 = combine_drc(m1, m2)
    except TotalConflictError:
        return
    r21 = combine_drc(m2, m1)
    assert r12.combined.masses == r21.combined.masses
    assert r12.conflict == r21.conflict


def test_vacuous_is_neutral_for_1000_random_bbas():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        frame = frame_of_size(int(rng.integers(1, 5)))
        m = random_bba(frame, rng, int(rng.integers(1, frame.full + 1)))
        r = combine_drc(m, BBA.vacuous(frame))
        assert r.conflict == 0.0
        assert r.combined.masses.keys() == m.masses.keys()
        assert max(abs(r.combined.masses[k] - v) for k, v in m.masses.items()) <= 1e-12


def test_drc_associative_to_tolerance():
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 200:
        frame = frame_of_size(int(rng.integers(1, 4)))
        a, b, c = (random_bba(frame, rng, int(rng.integers(1, frame.full + 1))) for _ in range(3))
        try:
            left = combine_drc(combine_drc(a, b).combined, c)
            right = combine_drc(a, combine_drc(b, c).combined)
        except TotalConflictError:
            continue
        keys = set(left.combined.masses) | set(right.combined.masses)
        assert all(abs(left.mass(k) - right.mass(k)) <= 1e-9 for k in keys)
        checked += 1


def test_cdrc_degenerates_to_drc():
    rng = np.random.default_rng(3)
    for _ in range(300):
        m1, m2 = _random_pair(int(rng.integers(2**32)))
        try:
            real = combine_drc(m1, m2)
        except TotalConflictError:
            continue
        cplx = combine_cdrc(CBBA(m1.frame, m1.masses), CBBA(m2.frame, m2.masses))
        assert cplx.backend is Backend.CLASSICAL_CDRC
        assert cplx.combined.masses.keys() == real.combined.masses.keys()
        for k, v in real.combined.masses.items():
            assert abs(cplx.combined.masses[k] - v) <= 1e-12
            assert cplx.combined.masses[k].imag == 0.0


def test_cdrc_vacuous_neutral_complex():
    m1 = CBBA.from_labels(AB, {"a": 0.5 + 0.5j, "a,b": 0.5 - 0.5j})
    r = combine_cdrc(m1, CBBA.vacuous(AB))
    assert r.conflict == 0
    assert r.combined.masses == m1.masses


def test_cdrc_worked_example():
    m1 = CBBA.from_labels(AB, {"a": 0.5 + 0.5j, "b": 0.5 - 0.5j})
    m2 = CBBA.from_labels(AB, {"a": 0.5, "a,b": 0.5})
    k, expected = nested_loop_drc(as_sets(m1), as_sets(m2))
    assert k == pytest.approx(0.25 - 0.25j)
    # (0.5+0.5i)/(0.75+0.25i) and (0.25-0.25i)/(0.75+0.25i), by hand
    assert expected[frozenset("a")] == pytest.approx(0.8 + 0.4j)
    assert expected[frozenset("b")] == pytest.approx(0.2 - 0.4j)
    r = combine_cdrc(m1, m2)
    assert abs(r.conflict - (0.25 - 0.25j)) <= 1e-15
    assert abs(r.combined.masses[0b01] - (0.8 + 0.4j)) <= 1e-12
    assert abs(r.combined.masses[0b10] - (0.2 - 0.4j)) <= 1e-12
    total = sum(r.combined.masses.values())
    assert abs(total - 1) <= 1e-9


def test_cdrc_random_matches_oracle():
    rng = np.random.default_rng(4)
    for _ in range(200):
        frame = frame_of_size(int(rng.integers(1, 4)))
        m1, m2 = random_cbba(frame, rng), random_cbba(frame, rng)
        k, expected = nested_loop_drc(as_sets(m1), as_sets(m2))
        if abs(1 - k) <= 1e-9:
            continue
        r = combine_cdrc(m1, m2)
        got = as_sets(r.combined)
        for a, v in expected.items():
            assert abs(got[a] - v) <= 1e-9
        assert abs(sum(r.combined.masses.values()) - 1) <= 1e-9


def test_cdrc_singular():
    with pytest.raises(TotalConflictError):
        combine_cdrc(CBBA.from_labels(AB, {"a": 1}), CBBA.from_labels(AB, {"b": 1}))


def _result(masses):
    return FusionResult(BBA.from_labels(AB, masses), 0.0, Backend.CLASSICAL_DRC)


def test_decide():
    assert decide(_result({"a": 0.756, "b": 0.146, "a,b": 0.098})) == "a"
    assert decide(_result({"a": 0.5, "b": 0.5})) == "a"
    assert decide(_result({"b": 0.5, "a": 0.5})) == "a"
    assert decide(_result({"a,b": 1.0})) == "a,b"
    with pytest.raises(ValueError):
        decide(_result({}))
