from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgk3.errors import BadParameter, HasseViolation, InadmissibleTriple, SingularFiber, SupersingularInput
from hgk3.finite_field import PrimeFieldElement, legendre, primes_in
from hgk3.frobenius_k3 import (
    CharPoly3,
    SplitCase,
    compute_A,
    compute_A_detail,
    d_alpha,
    factor_cubic,
    predict_charpoly,
    predict_charpoly_C,
    sym2_charpoly,
    truncated_hasse,
    verify_unit_root_congruences,
    verify_weil,
)

TRIPLES = ["half", "third", "quarter", "sixth"]


def test_d_alpha():
    assert d_alpha("half") == -1
    assert d_alpha("quarter") == -2
    assert d_alpha("third") == -3
    with pytest.raises(InadmissibleTriple):
        d_alpha((F(1, 5), F(2, 5), F(1, 2)))


def test_split_example():
    d = compute_A_detail("half", 4, 7)
    assert d.case is SplitCase.SPLIT
    assert d.b == PrimeFieldElement(3, 7)
    assert d.trace == 4 and d.A == 2


def test_inert_example():
    d = compute_A_detail("half", 3, 7)
    assert legendre(-2, 7) == -1
    assert d.case is SplitCase.INERT_ORDINARY
    assert d.A == legendre(-1, 7) * d.trace


def test_supersingular_branch():
    A, case = compute_A("half", 4, 5)
    assert case is SplitCase.INERT_SUPERSINGULAR and A == 10
    cp = predict_charpoly("half", 4, 5)
    assert verify_weil(cp, 5)
    assert cp.coeffs == CharPoly3.from_factors(-1, 10, 5).coeffs


def test_predicted_cubic():
    cp = predict_charpoly("half", 4, 7)
    assert str(cp) == "(1 - 7T)(1 - 2T + 49T^2)"
    assert cp.coeffs == (-9, 63, -343)
    assert predict_charpoly("half", 4, 7, chi=-1).coeffs == (9, 63, 343)


def test_c_route_examples():
    assert predict_charpoly_C("half", 4, 7) == predict_charpoly("half", 4, 7).__class__.from_factors(1, 2, 7)
    cp = predict_charpoly_C("half", 2, 5)
    assert str(cp) == "(1 - 5T)(1 + 6T + 25T^2)"
    assert cp.coeffs == predict_charpoly("half", 2, 5).coeffs
    with pytest.raises(BadParameter):
        predict_charpoly_C("third", 2, 7)


def test_bad_parameters():
    for a, p in [(7, 7), (1, 7), (8, 7), (2, 9), (2, 3), (F(1, 7), 7)]:
        with pytest.raises(BadParameter):
            predict_charpoly("half", a, p)


def test_c_route_pole():
    for a in (1, 8):
        with pytest.raises(SingularFiber):
            predict_charpoly_C("half", a, 7)


def test_sym2():
    assert str(sym2_charpoly(0, 7)) == "(1 - 7T)(1 + 14T + 49T^2)"
    assert sym2_charpoly(4, 7).coeffs == predict_charpoly("half", 4, 7).coeffs
    with pytest.raises(HasseViolation):
        sym2_charpoly(6, 7)


def test_weil_rejects_tampering():
    cp = predict_charpoly("half", 4, 7)
    assert verify_weil(cp, 7)
    bad = CharPoly3(cp.c1, cp.c2 + 1, cp.c3, 7, cp.linear_sign, cp.quad_trace)
    assert not verify_weil(bad, 7)
    assert verify_weil(bad, 7).reason == "no-factorization"
    big = CharPoly3.from_factors(1, 15, 7)
    assert verify_weil(big, 7).reason == "quadratic-not-weil"


def test_unit_root_examples():
    r = verify_unit_root_congruences("half", 4, 7)
    assert r.ok
    # the truncated Hasse polynomial at b = 3 is -a_7 mod 7
    assert truncated_hasse("half", 7)(PrimeFieldElement(3, 7)) == -4
    r = verify_unit_root_congruences("half", 3, 7)
    assert r.ok and r.values["ratio"] == (6, 0)
    with pytest.raises(SupersingularInput):
        verify_unit_root_congruences("half", 4, 5)


@given(st.sampled_from(TRIPLES), st.sampled_from(primes_in(5, 60)), st.integers(2, 10**6), st.sampled_from([1, -1]))
def test_cubic_properties(name, p, a, chi):
    a = 2 + a % (p - 2)
    cp = predict_charpoly(name, a, p, chi)
    assert verify_weil(cp, p, chi)
    assert cp.c3 == -legendre(1 - a, p) * chi * p**3
    assert factor_cubic(*cp.coeffs, p) == (cp.linear_sign, cp.quad_trace)
    assert cp.c2 == p * p + cp.linear_sign * p * cp.quad_trace
    flipped = predict_charpoly(name, a, p, -chi)
    assert (flipped.c1, flipped.c2, flipped.c3) == (-cp.c1, cp.c2, -cp.c3)


@given(st.sampled_from(["half", "sixth"]), st.sampled_from(primes_in(5, 60)), st.integers(2, 10**6))
def test_two_routes_agree(name, p, a):
    a = 2 + a % (p - 2)
    assert predict_charpoly(name, a, p).coeffs == predict_charpoly_C(name, a, p).coeffs


def test_other_root_gives_same_A():
    for name in TRIPLES:
        for p in (11, 13, 17):
            for a in range(2, p):
                assert compute_A(name, a, p) == compute_A(name, a, p, other_root=True)
