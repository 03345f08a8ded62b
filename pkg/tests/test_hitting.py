"""Unit tests for hitting checks, witness construction, and certificates."""

import dataclasses
import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fupcon.exact_arith import Moduli, NoDecomposition
from fupcon.hitting import (
    ConditionFails,
    HittingCertificate,
    NotFoundWithin,
    SizeGuardExceeded,
    build_certificate,
    crt_witness,
    hitting_check,
    level_condition,
    minimal_level,
    preimage_connected_check,
    preimage_equality_check,
    valuation_level,
    witness_recipe,
)
from fupcon.lifting import PLLoop, standard_lift_points
from fupcon.torus import TorusPoint

M23 = Moduli.of(2, 3)
M4 = Moduli.of(4)

Fr = Fraction

LEVEL_CASES = [
    # (s, moduli, minimal level)
    ((8,), Moduli.of(2), 3),
    ((2,), Moduli.of(2), 1),
    ((1,), Moduli.of(2), 0),
    ((2,), M4, 1),
    ((2, 3), M23, 1),
    ((1, 1), M23, 0),
]

VALUATION_CASES = [
    ((2, 3), M23, 6),
    ((1, 1), M23, 1),
    ((4, 1), M23, 36),
]


def brute_force_hits(s, moduli, n):
    """Direct sweep: does the stage n+1 standard lift pass through every
    preimage of the base point?"""
    m_pow = [m ** (n + 1) for m in moduli]
    period = math.lcm(*(mp // math.gcd(abs(si), mp) for si, mp in zip(s, m_pow)))
    targets = set(itertools.product(*[range(m) for m in moduli]))
    seen = set()
    for k in range(period):
        key = []
        for si, m, mp in zip(s, moduli, m_pow):
            num = (si * k) % mp
            if num % (m ** n):
                break
            key.append(num // (m ** n))
        else:
            seen.add(tuple(key))
    return seen == targets


def test_minimal_level_frozen():
    for s, moduli, expected in LEVEL_CASES:
        assert minimal_level(s, moduli) == expected


def test_valuation_level_frozen():
    for s, moduli, expected in VALUATION_CASES:
        assert valuation_level(s, moduli) == expected


def test_valuation_needs_a_clean_split():
    with pytest.raises(NoDecomposition):
        valuation_level((6,), M4)


def test_valuation_dominates_minimal():
    for s, moduli, _ in VALUATION_CASES:
        assert valuation_level(s, moduli) >= minimal_level(s, moduli)


def test_level_condition_matches_minimal():
    for s, moduli, least in LEVEL_CASES:
        for n in range(least + 3):
            assert level_condition(s, moduli, n) is (n >= least)


def test_minimal_level_error_paths():
    with pytest.raises(NotFoundWithin):
        minimal_level((8,), Moduli.of(2), n_max=2)  # true answer is 3
    from fupcon.lifting import NonadmissibleWinding

    with pytest.raises(NonadmissibleWinding):
        minimal_level((0, 1), M23)


def test_hitting_check_agrees_with_brute_force():
    for s, moduli, least in LEVEL_CASES:
        for n in range(min(least + 2, 4)):
            got = hitting_check(s, moduli, n)
            assert got is brute_force_hits(s, tuple(moduli), n)
            assert got is level_condition(s, moduli, n)


def test_hitting_check_is_homotopy_invariant():
    bent = PLLoop(((Fr(0), Fr(0)), (Fr(3), Fr(-1)), (Fr(2), Fr(3))))
    straight = PLLoop.straight((2, 3))
    for n in range(3):
        assert hitting_check(bent, M23, n) is hitting_check(straight, M23, n)


def test_size_guard_trips():
    with pytest.raises(SizeGuardExceeded) as info:
        hitting_check((2, 3), M23, 6, size_guard=100)
    assert info.value.needed > info.value.guard == 100


def test_witness_frozen():
    assert crt_witness((2, 3), M23, 1, (1, 2)) == 5
    assert crt_witness((6,), M4, 1, (2,)) == 4


def test_witness_hits_requested_fiber_point():
    for s, moduli, least in LEVEL_CASES:
        n = least
        for target in itertools.product(*[range(m) for m in moduli]):
            k = crt_witness(s, moduli, n, target)
            pts = standard_lift_points(s, n + 1, moduli, k)
            want = TorusPoint(
                tuple(Fr(j, m) for j, m in zip(target, moduli))
            )
            assert pts[k] == want


def test_witness_requires_condition():
    with pytest.raises(ConditionFails):
        crt_witness((2, 3), M23, 0, (1, 1))


def test_witness_rejects_bad_target():
    with pytest.raises(ValueError):
        crt_witness((1, 1), M23, 0, (2, 0))
    with pytest.raises(ValueError):
        crt_witness((1, 1), M23, 0, (0,))


def test_recipe_frozen():
    rec = witness_recipe((2, 3), M23, 6)
    assert rec is not None
    assert rec.alphas == (1, 1)
    assert rec.betas == (5, 5)
    assert rec.cofactor == 7776
    assert rec.cofactor_parts == (243, 32)
    assert rec.units == (1, 1)


def test_recipe_absent_without_split_or_below_valuation_exponent():
    assert witness_recipe((6,), M4, 1) is None  # no clean m-adic split
    assert witness_recipe((2, 3), M23, 0) is None  # stage below the exponent


def test_certificate_round_trip():
    cert = build_certificate((2, 3), M23, 1)
    assert isinstance(cert, HittingCertificate)
    assert len(cert.witnesses) == 6
    assert cert.verify()


def test_certificate_on_generalized_route():
    cert = build_certificate((6,), M4, 1)
    assert cert.recipe is None
    assert cert.verify()


def test_tampered_certificate_fails():
    cert = build_certificate((2, 3), M23, 1)
    (t0, k0), *rest = cert.witnesses
    bad = dataclasses.replace(cert, witnesses=((t0, k0 + 1), *rest))
    assert not bad.verify()
    short = dataclasses.replace(cert, witnesses=tuple(rest))
    assert not short.verify()


def test_preimage_checks_frozen_pattern():
    assert preimage_equality_check((2, 3), M23, 0) is False
    connected, count = preimage_connected_check((2, 3), M23, 0)
    assert (connected, count) == (False, 6)
    assert preimage_equality_check((2, 3), M23, 1) is True
    assert preimage_connected_check((2, 3), M23, 1) == (True, 1)
    assert preimage_equality_check((1, 1), M23, 0) is True
    assert preimage_connected_check((1, 1), M23, 0) == (True, 1)


@st.composite
def small_case(draw):
    moduli = draw(st.sampled_from([(2,), (3,), (4,), (5,), (2, 3), (3, 4), (2, 5)]))
    s = tuple(
        draw(st.integers(min_value=-12, max_value=12).filter(lambda v: v != 0))
        for _ in moduli
    )
    n = draw(st.integers(min_value=0, max_value=2))
    return s, Moduli(moduli), n


@settings(max_examples=60, deadline=None)
@given(small_case())
def test_hitting_matches_condition_randomized(case):
    s, moduli, n = case
    if moduli.product() ** (n + 1) > 10**4:
        return
    assert hitting_check(s, moduli, n) is level_condition(s, moduli, n)


@settings(max_examples=40, deadline=None)
@given(small_case())
def test_witnesses_randomized(case):
    s, moduli, n = case
    if moduli.product() ** (n + 1) > 10**4:
        return
    if not level_condition(s, moduli, n):
        return
    for target in itertools.product(*[range(m) for m in moduli]):
        k = crt_witness(s, moduli, n, target)
        want = TorusPoint(tuple(Fr(j, m) for j, m in zip(target, moduli)))
        assert standard_lift_points(s, n + 1, moduli, k)[k] == want
