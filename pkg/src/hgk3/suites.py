"""Verification campaigns shared by the CLI and the acceptance tests."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import isocrystal_check as iso
from .elliptic import set_persistent_cache, verify_isogeny
from .errors import IntegrabilityFailure, SingularFiber, SupersingularInput
from .finite_field import QuadExtElement, legendre, primes_in
from .frobenius_k3 import (
    SplitCase,
    compute_A_detail,
    predict_charpoly,
    predict_charpoly_C,
    sym2_charpoly,
    verify_unit_root_congruences,
    verify_weil,
)
from .qseries import TRIPLES

SUITES = ("clausen", "connection", "odes", "xmatrix", "isogeny", "unitroot", "cross", "weil")

DEFAULTS = {
    "clausen": {"order": 64},
    "connection": {"order": 40},
    "odes": {"order": 30},
    "xmatrix": {},
    "isogeny": {"pmax": 50},
    "unitroot": {"pmax": 50},
    "cross": {"pmax": 97},
    "weil": {"pmax": 97},
}


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed == self.total

    def record(self, ok: bool, instance: dict):
        self.total += 1
        if ok:
            self.passed += 1
        else:
            self.failures.append(instance)

    def merge(self, rows):
        for ok, instance in rows:
            if ok is None:
                self.skipped += 1
            else:
                self.record(ok, instance)
        return self


def _worker_init():
    # only the parent process writes the persistent cache
    set_persistent_cache(None)


def fan_out(fn, items, jobs: int):
    """Apply fn to each item (optionally in worker processes) and concatenate the row lists."""
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init) as pool:
            chunks = list(pool.map(fn, items))
    else:
        chunks = [fn(i) for i in items]
    return [row for chunk in chunks for row in chunk]


def random_admissible_pairs(rng: random.Random, n: int) -> list[tuple[Fraction, Fraction]]:
    out = []
    while len(out) < n:
        a = Fraction(rng.randint(1, 11), rng.randint(2, 12))
        b = Fraction(rng.randint(1, 11), rng.randint(2, 12))
        if 0 < a < 1 and 0 < b < 1:
            out.append((a, b))
    return out


def suite_clausen(order: int = 64, seed: int = 0, **_) -> SuiteResult:
    res = SuiteResult("clausen")
    pairs = [(Fraction(1, 4), Fraction(1, 4)), (Fraction(1, 12), Fraction(5, 12))]
    pairs += random_admissible_pairs(random.Random(seed), 5)
    for a, b in pairs:
        r = iso.clausen_verify(a, b, order)
        res.record(r.ok, {"check": "clausen", "a": str(a), "b": str(b), "index": r.first_failure})
    for name in TRIPLES:
        r = iso.clausen2_verify(name, order)
        res.record(r.ok, {"check": "clausen2", "triple": name, "index": r.first_failure})
    for name in ("half", "sixth"):
        r = iso.pfaff_transform_verify(name, min(order, 48))
        res.record(r.ok, {"check": "pfaff", "triple": name, "stage": r.name, "index": r.first_failure})
    return res


def suite_connection(order: int = 40, **kw) -> SuiteResult:
    res = SuiteResult("connection")
    for name in TRIPLES:
        r = iso.verify_connection(name, order)
        res.record(r.ok, {"check": "connection", "triple": name, "where": r.name, "index": r.first_failure})
    odes = suite_odes(order=min(order, 30))
    res.passed += odes.passed
    res.total += odes.total
    res.failures += odes.failures
    return res


def suite_odes(order: int = 30, **_) -> SuiteResult:
    res = SuiteResult("odes")
    for name in TRIPLES:
        try:
            iso.frobenius_entry_odes(name, order)
            ok = True
        except IntegrabilityFailure:
            ok = False
        res.record(ok, {"check": "odes-integrable", "triple": name})
        try:
            iso.frobenius_entry_odes(name, order, e0=1, e3_0=0)
            ok = False
        except IntegrabilityFailure:
            ok = True
        res.record(ok, {"check": "odes-mismatched-constants-rejected", "triple": name})
    return res


def suite_xmatrix(**_) -> SuiteResult:
    res = SuiteResult("xmatrix")
    r = iso.verify_xmatrix_half()
    res.record(r.ok, {"check": "reference X", "entry": r.name})
    for name in TRIPLES:
        resid = iso.annihilation_residual(name)
        res.record(all(e == 0 for e in resid), {"check": "annihilation", "triple": name})
        X = iso.basis_matrix_X(name)
        upper = all(X[i, j] == 0 for i in range(3) for j in range(i))
        diag = all(X[i, i] != 0 for i in range(3))
        res.record(upper and diag, {"check": "upper triangular", "triple": name})
    return res


def _isogeny_rows(args):
    name, p, seed = args
    rng = random.Random(f"{seed}:{name}:{p}")
    rows = []
    done = attempts = 0
    while done < 20 and attempts < 400:
        attempts += 1
        b = QuadExtElement(rng.randrange(p), rng.randrange(p), p)
        try:
            r = verify_isogeny(name, b, p)
        except SingularFiber:
            continue
        done += 1
        inst = {"triple": name, "p": p, "b": [b.x, b.y], "source": r.source_count, "target": r.target_count}
        rows.append((bool(r), dict(inst, check="isogeny")))
        if name == "third" and 2 * b != 1:
            alt = verify_isogeny(name, b, p, convention="family_model")
            rows.append((not alt.pointwise, dict(inst, check="other convention rejected")))
    return rows


def suite_isogeny(pmax: int = 50, seed: int = 0, jobs: int = 1, **_) -> SuiteResult:
    items = [(name, p, seed) for name in TRIPLES for p in primes_in(5, pmax)]
    return SuiteResult("isogeny").merge(fan_out(_isogeny_rows, items, jobs))


def _unitroot_rows(args):
    name, p = args
    rows = []
    for a in range(2, p):
        try:
            r = verify_unit_root_congruences(name, a, p)
        except SupersingularInput:
            rows.append((None, {}))
            continue
        rows.append((r.ok, {"triple": name, "p": p, "a": a, "case": r.case.value, "checks": r.checks}))
    return rows


def suite_unitroot(pmax: int = 50, jobs: int = 1, **_) -> SuiteResult:
    items = [(name, p) for name in TRIPLES for p in primes_in(5, pmax)]
    return SuiteResult("unitroot").merge(fan_out(_unitroot_rows, items, jobs))


def _cross_rows(args):
    name, p = args
    rows = []
    for a in range(2, p):
        e, c = predict_charpoly(name, a, p), predict_charpoly_C(name, a, p)
        rows.append((e.coeffs == c.coeffs, {"triple": name, "p": p, "a": a, "E": e.coeffs, "C": c.coeffs}))
    return rows


def suite_cross(pmax: int = 97, jobs: int = 1, **_) -> SuiteResult:
    items = [(name, p) for name in ("half", "sixth") for p in primes_in(5, pmax)]
    return SuiteResult("cross").merge(fan_out(_cross_rows, items, jobs))


def _weil_rows(args):
    name, p, chi = args
    rows = []
    for a in range(2, p):
        cp = predict_charpoly(name, a, p, chi)
        ell = legendre(1 - a, p)
        detail = compute_A_detail(name, a, p)
        w = verify_weil(cp, p, chi)
        inst = {"triple": name, "p": p, "a": a, "coeffs": cp.coeffs, "case": cp.case.value}
        rows.append((w.ok, dict(inst, check="weil", reason=w.reason)))
        rows.append((cp.c3 == -ell * chi * p**3, dict(inst, check="determinant")))
        rows.append(((cp.c1 + chi * detail.A) % p == 0, dict(inst, check="trace mod p")))
        if cp.case is SplitCase.INERT_SUPERSINGULAR:
            roots = sorted([cp.linear_sign * p, chi * p, chi * p])
            rows.append((roots == sorted([chi * p, chi * p, -chi * p]), dict(inst, check="supersingular roots")))
        if ell == 1:
            s2 = sym2_charpoly(detail.trace, p)
            rows.append((chi != 1 or s2.coeffs == cp.coeffs, dict(inst, check="sym2")))
    return rows


def suite_weil(pmax: int = 97, jobs: int = 1, chi: int = 1, **_) -> SuiteResult:
    items = [(name, p, chi) for name in TRIPLES for p in primes_in(5, pmax)]
    return SuiteResult("weil").merge(fan_out(_weil_rows, items, jobs))


RUNNERS = {
    "clausen": suite_clausen,
    "connection": suite_connection,
    "odes": suite_odes,
    "xmatrix": suite_xmatrix,
    "isogeny": suite_isogeny,
    "unitroot": suite_unitroot,
    "cross": suite_cross,
    "weil": suite_weil,
}


def run_suite(name: str, order: int | None = None, pmax: int | None = None, seed: int = 0, jobs: int = 1) -> SuiteResult:
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    kw = dict(DEFAULTS[name])
    if order is not None and "order" in kw:
        kw["order"] = order
    if pmax is not None and "pmax" in kw:
        kw["pmax"] = pmax
    return RUNNERS[name](seed=seed, jobs=jobs, **kw)
