import random
from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hgk3.elliptic import (
    CurveFamily,
    WeierstrassCurve,
    count_points,
    count_points_naive,
    curve_at,
    hasse_ok,
    is_cm_heuristic,
    is_supersingular,
    j_invariant,
    normal_form,
    trace_ap,
    trace_ap2,
    verify_isogeny,
)
from hgk3.errors import SingularFiber
from hgk3.finite_field import PrimeField, PrimeFieldElement, QuadExtElement, QuadExtField, primes_in

FAMILIES = ["half", "third", "quarter", "sixth"]


def test_family_models():
    e = curve_at(CurveFamily.E_HALF, 3, PrimeField(7))
    assert (e.a2, e.a4, e.a6) == (-4, 3, 0)
    c = curve_at(CurveFamily.C_HALF, 4, PrimeField(7))
    assert (c.a2, c.a4, c.a6) == (-2, 6, 0)
    with pytest.raises(SingularFiber):
        curve_at(CurveFamily.E_QUARTER, 1)
    with pytest.raises(SingularFiber):
        curve_at(CurveFamily.C_HALF, 1, PrimeField(7))


def test_small_counts():
    assert count_points(WeierstrassCurve(0, 1, 0, PrimeField(5))) == 4
    e = curve_at("half", 3, PrimeField(7))
    assert count_points(e) == 4 and trace_ap(e) == 4
    assert trace_ap2(e) == 2
    assert trace_ap2(e.base_change(), "Fp2") == 2


def test_supersingular():
    assert is_supersingular(WeierstrassCurve(0, 1, 0, PrimeField(7)))
    assert not is_supersingular(WeierstrassCurve(0, 1, 0, PrimeField(5)))
    e = WeierstrassCurve(0, 1, 0, PrimeField(7))
    assert trace_ap(e) == 0 and trace_ap2(e) == -14


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILIES), st.sampled_from(primes_in(5, 40)), st.integers(0, 10**6), st.integers(0, 10**6))
def test_vectorized_counts_match_naive_and_hasse(fam, p, u, v):
    b = QuadExtElement(u % p, v % p, p)
    try:
        e = curve_at(fam, b)
    except SingularFiber:
        return
    assert hasse_ok(e)
    if p < 20:
        assert count_points(e) == count_points_naive(e)
    if e.descends():
        assert trace_ap2(e, "Fp") == trace_ap2(e, "Fp2")


def test_j_invariants():
    assert j_invariant(WeierstrassCurve(0, 1, 0)) == 1728
    assert j_invariant(WeierstrassCurve(0, 0, 1)) == 0
    e = curve_at("half", -1)
    assert j_invariant(e) == j_invariant(e.twist(-3))


def test_normal_forms():
    s = sp.Symbol("s")
    nf = normal_form("half")
    ratio = sp.cancel(nf.discriminant / (s**2 * (1 - s) ** 2))
    assert ratio.is_number and ratio != 0
    for fam in FAMILIES:
        nf = normal_form(fam)
        assert nf.discriminant.subs(s, 0) == 0
        assert nf.g2.subs(s, 0) * nf.g3.subs(s, 0) != 0


def test_normal_form_preserves_counts():
    rng = random.Random(3)
    for fam in FAMILIES:
        for p in (7, 11, 13):
            b = PrimeFieldElement(rng.randrange(2, p - 1), p)
            try:
                e = curve_at(fam, b)
            except SingularFiber:
                continue
            assert count_points(normal_form(fam).curve_at(b, PrimeField(p))) == count_points(e)


def test_half_isogeny_is_polynomial_identity():
    x, b = sp.symbols("x b")
    assert sp.expand(x * (x - 1) * (x - b) + (1 - x) * ((1 - x) - 1) * ((1 - x) - (1 - b))) == 0


def test_quarter_isogeny_p13():
    rng = random.Random(0)
    checked = 0
    while checked < 20:
        b = QuadExtElement(rng.randrange(13), rng.randrange(13), 13)
        try:
            r = verify_isogeny("quarter", b, 13)
        except SingularFiber:
            continue
        assert r.pointwise and r.counts_equal
        checked += 1


def test_third_isogeny_convention_matters():
    b = QuadExtElement(3, 5, 11)
    assert verify_isogeny("third", b, 11, convention="source_b")
    other = verify_isogeny("third", b, 11, convention="family_model")
    assert not other.pointwise
    # counts alone cannot tell the two readings apart
    assert other.counts_equal


def test_twisted_counts():
    p = 17
    for fam in FAMILIES:
        b = QuadExtElement(4, 9, p)
        r = verify_isogeny(fam, b, p)
        assert r.source_count == r.target_count
        assert count_points(curve_at(fam, b, QuadExtField(p))) == r.source_count


def test_cm_examples():
    assert is_cm_heuristic("half", -1).cm
    assert is_cm_heuristic("half", 64).cm
    d = is_cm_heuristic("half", 2)
    assert not d.cm and d.fraction < 0.15
    assert d.tested + len(d.skipped) == len(primes_in(5, 500))


def test_cm_accepts_rationals():
    d = is_cm_heuristic(CurveFamily.E_QUARTER, F(1, 9), bound=200)
    assert d.cm


def test_cm_third_table_entry():
    # -1/1512 gives j in Q(sqrt 63546), a field holding no CM j-invariant
    assert not is_cm_heuristic("third", F(-1, 1512)).cm
    # one more power of 2 lands on a CM point with j in Q(sqrt 21)
    assert is_cm_heuristic("third", F(-1, 3024)).cm
