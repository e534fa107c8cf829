import dataclasses
import itertools

import pytest

from hgk3.errors import BadParameter, CalibrationFailure
from hgk3.finite_field import legendre
from hgk3.k3_oracle import (
    SurfaceFamily,
    calibrate,
    compare_traces,
    count_double_cover_affine,
    count_dwork_cone,
    count_dwork_quartic,
    count_triple_product_affine,
    double_char_sum,
    dwork_divisibility_check,
    surface_count,
    triple_char_sum,
    triple_count_from_sum,
    validate,
)


def _dwork_naive(a, p):
    n = 0
    for x in itertools.product(range(p), repeat=4):
        if not any(x):
            continue
        # normalize: first nonzero coordinate is 1
        lead = next(c for c in x if c)
        if lead != 1:
            continue
        x0, x1, x2, x3 = x
        if (a * x0**4 + x1**4 + x2**4 + x3**4 - 4 * x0 * x1 * x2 * x3) % p == 0:
            n += 1
    return n


def test_dwork_count_matches_scan():
    for a in range(2, 5):
        assert count_dwork_quartic(a, 5) == _dwork_naive(a, 5)
    assert count_dwork_quartic(2, 5) == 0


def test_dwork_cone_consistency():
    for a in range(2, 5):
        assert count_dwork_cone(a, 5) == 4 * count_dwork_quartic(a, 5) + 1


def test_dwork_weil_envelope():
    for p in (7, 11, 13):
        for a in range(2, p):
            assert abs(count_dwork_quartic(a, p) - 1 - p * p) <= 22 * p


def test_dwork_divisibility_small_grid():
    for p in (5, 7, 11, 13):
        for a in range(2, p):
            r = dwork_divisibility_check(a, p)
            assert r.ok, (p, a, r)
            assert abs(r.n) <= 19


def test_dwork_budget_guard():
    with pytest.raises(BadParameter):
        count_dwork_quartic(2, 67)


def test_triple_product_identity():
    for p in (5, 7, 11):
        for a in range(1, p):
            assert count_triple_product_affine(a, p) == triple_count_from_sum(a, p)
            assert abs(triple_char_sum(a, p)) <= 8 * p + 24


def test_triple_sum_symmetric_under_relabeling():
    p, a = 7, 3
    chi = lambda n: legendre(n, p)  # noqa: E731
    direct = 0
    for u, v in itertools.product(range(1, p), repeat=2):
        w = a * pow(u * v, -1, p) % p
        direct += chi(1 - w) * chi(1 - u) * chi(1 - v)
    assert direct == triple_char_sum(a, p)


def test_double_cover_identity():
    for p in (5, 7, 11):
        for a in range(1, p):
            assert count_double_cover_affine(a, p) == p * p + double_char_sum(a, p)
    # chi(0) = 0 on x*y = 0 rows
    assert surface_count(SurfaceFamily.AOP, 3, 7).count == 49 + double_char_sum(3, 7)


def test_calibration_small_training():
    for fam in (SurfaceFamily.TRIPLE, SurfaceFamily.AOP):
        m = calibrate(fam, training_primes=(5, 7))
        assert m.sign in (1, -1)
        # signature-measurable: one coefficient pair per signature
        assert all(len(c) == 2 for c in m.coeffs.values())


def test_validation_and_trace_agreement():
    m1 = calibrate(SurfaceFamily.TRIPLE)
    m2 = calibrate(SurfaceFamily.AOP)
    r1, r2 = validate(m1, (17, 50)), validate(m2, (17, 50))
    assert r1.ok and r2.ok and r1.total == 269
    assert compare_traces(r1, r2) == []


def test_tampered_sign_fails():
    m = calibrate(SurfaceFamily.TRIPLE)
    bad = dataclasses.replace(m, sign=-m.sign)
    r = validate(bad, (17, 30))
    assert not r.ok and r.counterexample is not None


def test_calibration_failure_reports_residuals():
    with pytest.raises(CalibrationFailure) as exc:
        calibrate(SurfaceFamily.TRIPLE, triple="third")
    tables = exc.value.residuals
    assert [s for s, _ in tables] == [1, -1]


def test_calibration_rejects_bad_training():
    with pytest.raises(BadParameter):
        calibrate(SurfaceFamily.DWORK)
    with pytest.raises(BadParameter):
        calibrate(SurfaceFamily.TRIPLE, training_primes=(5, 17))
