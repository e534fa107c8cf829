"""Brute-force counts on explicit K3 models, compared with the predicted traces.

Three models:
  DworkQuartic     a*x0^4 + x1^4 + x2^4 + x3^4 - 4*x0*x1*x2*x3 = 0 in P^3
  AOPDoubleCover   z^2 = x*y*(1+x)*(1+y)*(x - a*y)
  TripleProduct    (1-x^2)(1-y^2)(1-z^2) = a
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadParameter, CalibrationFailure
from .finite_field import inverse_table, legendre, primes_in, square_table
from .frobenius_k3 import D_ALPHA, check_parameter, compute_A_detail

MAX_DWORK_PRIME = 64
COEFF_BOUND = 24


class SurfaceFamily(Enum):
    DWORK = "DworkQuartic"
    AOP = "AOPDoubleCover"
    TRIPLE = "TripleProduct"


@dataclass(frozen=True)
class SurfaceCount:
    family: SurfaceFamily
    p: int
    a: int
    count: int
    derived: dict = field(default_factory=dict, compare=False)


def predicted_trace(a, p: int, triple: str = "half", chi: int = 1) -> int:
    """Trace of the predicted cubic: chi*((1-a / p)*p + A)."""
    detail = compute_A_detail(triple, a, p)
    r = check_parameter(a, p)
    return chi * (legendre(1 - r, p) * p + detail.A)


# Dwork quartic --------------------------------------------------------------


def count_dwork_quartic(a, p: int, force: bool = False) -> int:
    """Points of the quartic in P^3(F_p), stratified by the first nonzero coordinate."""
    a = check_parameter(a, p)
    if p > MAX_DWORK_PRIME and not force:
        raise BadParameter(f"p={p} exceeds the O(p^3) budget (p <= {MAX_DWORK_PRIME})")
    r = np.arange(p, dtype=np.int64)
    q4 = r**4 % p
    # x0 = 1
    x1, x2 = np.meshgrid(r, r, indexing="ij")
    base = (a + q4[x1] + q4[x2]) % p
    prod12 = 4 * x1 * x2 % p
    n = 0
    for x3 in range(p):
        n += int(np.count_nonzero((base + q4[x3] - prod12 * x3) % p == 0))
    # x0 = 0, x1 = 1
    n += int(np.count_nonzero((1 + q4[x1] + q4[x2]) % p == 0))
    # x0 = x1 = 0, x2 = 1
    n += int(np.count_nonzero((1 + q4) % p == 0))
    return n


def count_dwork_cone(a, p: int) -> int:
    """Solutions in F_p^4 (the affine cone), by direct scan."""
    a = a % p
    r = np.arange(p, dtype=np.int64)
    x0, x1, x2, x3 = np.meshgrid(r, r, r, r, indexing="ij")
    v = (a * x0**4 + x1**4 + x2**4 + x3**4 - 4 * x0 * x1 * x2 * x3) % p
    return int(np.count_nonzero(v == 0))


@dataclass
class DworkReport:
    a: int
    p: int
    count: int
    A: int
    tr_pred: int
    n: int | None
    divisible: bool
    mod_p: bool

    @property
    def ok(self) -> bool:
        return self.divisible and self.mod_p and abs(self.n) <= 19

    def __bool__(self):
        return self.ok


def dwork_divisibility_check(a, p: int, chi: int = 1) -> DworkReport:
    count = count_dwork_quartic(a, p)
    A = compute_A_detail("quarter", a, p).A
    tr = predicted_trace(a, p, "quarter", chi)
    resid = count - 1 - p * p - tr
    divisible = resid % p == 0
    n = resid // p if divisible else None
    mod_p = (count - 1 - chi * A) % p == 0
    return DworkReport(check_parameter(a, p), p, count, A, tr, n, divisible, mod_p)


# character sums -------------------------------------------------------------


def triple_char_sum(a, p: int) -> int:
    """T3(a) = sum over u*v*w = a in (F_p^*)^3 of chi(1-u) chi(1-v) chi(1-w)."""
    a = a % p
    if a == 0:
        raise BadParameter("a must be nonzero mod p")
    chi = square_table(p).astype(np.int64)
    inv = inverse_table(p)
    u = np.arange(1, p, dtype=np.int64)
    cu = chi[(1 - u) % p]
    uu, vv = np.meshgrid(u, u, indexing="ij")
    w = a * inv[uu * vv % p] % p
    total = cu[:, None] * cu[None, :] * chi[(1 - w) % p]
    return int(total.sum())


def count_triple_product_affine(a, p: int) -> int:
    """Affine solutions of (1-x^2)(1-y^2)(1-z^2) = a, by O(p^3) scan."""
    a = a % p
    r = np.arange(p, dtype=np.int64)
    f = (1 - r * r) % p
    fx, fy = np.meshgrid(f, f, indexing="ij")
    fxy = fx * fy % p
    return sum(int(np.count_nonzero(fxy * fz % p == a)) for fz in f)


def triple_count_from_sum(a, p: int) -> int:
    return (p - 1) ** 2 - 3 * (p - 1) + 3 + triple_char_sum(a, p)


def double_char_sum(a, p: int) -> int:
    """S(a) = sum over x, y of chi(x*y*(1+x)*(1+y)*(x - a*y))."""
    a = a % p
    chi = square_table(p).astype(np.int64)
    r = np.arange(p, dtype=np.int64)
    x, y = np.meshgrid(r, r, indexing="ij")
    v = x * y % p * ((1 + x) * (1 + y) % p) % p * ((x - a * y) % p) % p
    return int(chi[v].sum())


def count_double_cover_affine(a, p: int) -> int:
    """Affine solutions (x, y, z) of z^2 = xy(1+x)(1+y)(x - a y), by O(p^3) scan."""
    a = a % p
    r = np.arange(p, dtype=np.int64)
    x, y = np.meshgrid(r, r, indexing="ij")
    v = x * y % p * ((1 + x) * (1 + y) % p) % p * ((x - a * y) % p) % p
    return sum(int(np.count_nonzero(v == z * z % p)) for z in range(p))


OBSERVERS = {
    SurfaceFamily.TRIPLE: triple_char_sum,
    SurfaceFamily.AOP: double_char_sum,
}


def surface_count(family: SurfaceFamily, a, p: int) -> SurfaceCount:
    family = SurfaceFamily(family)
    r = check_parameter(a, p)
    if family is SurfaceFamily.DWORK:
        return SurfaceCount(family, p, r, count_dwork_quartic(r, p))
    if family is SurfaceFamily.TRIPLE:
        t3 = triple_char_sum(r, p)
        return SurfaceCount(family, p, r, (p - 1) ** 2 - 3 * (p - 1) + 3 + t3, {"T3": t3})
    s = double_char_sum(r, p)
    return SurfaceCount(family, p, r, p * p + s, {"S": s})


# calibration ----------------------------------------------------------------


def signature(a, p: int, triple: str = "half") -> tuple[int, int, int, int]:
    return (legendre(1 - a, p), legendre(a, p), legendre(-1, p), legendre(D_ALPHA[triple], p))


@dataclass
class CalibrationModel:
    family: SurfaceFamily
    triple: str
    sign: int
    coeffs: dict
    training_primes: tuple

    def predict(self, a, p: int) -> int | None:
        sig = signature(a, p, self.triple)
        if sig not in self.coeffs:
            return None
        c1, c0 = self.coeffs[sig]
        return self.sign * predicted_trace(a, p, self.triple) + c1 * p + c0

    def extract_trace(self, observed: int, a, p: int) -> int | None:
        """Invert the model: the transcendental trace implied by an observed sum."""
        sig = signature(a, p, self.triple)
        if sig not in self.coeffs:
            return None
        c1, c0 = self.coeffs[sig]
        return self.sign * (observed - c1 * p - c0)


def valid_parameters(p: int) -> range:
    return range(2, p)


def _fit_group(points: list[tuple[int, int]]) -> tuple[int, int] | None:
    """Integer (c1, c0) with r = c1*p + c0 for every (p, r), within the bounds."""
    primes = sorted({p for p, _ in points})
    by_p = {}
    for p, r in points:
        if by_p.setdefault(p, r) != r:
            return None
    if len(primes) == 1:
        p = primes[0]
        candidates = sorted(range(-COEFF_BOUND, COEFF_BOUND + 1), key=abs)
        for c1 in candidates:
            c0 = by_p[p] - c1 * p
            if abs(c0) <= COEFF_BOUND:
                return c1, c0
        return None
    p1, p2 = primes[0], primes[1]
    num = by_p[p2] - by_p[p1]
    if num % (p2 - p1):
        return None
    c1 = num // (p2 - p1)
    c0 = by_p[p1] - c1 * p1
    if abs(c1) > COEFF_BOUND or abs(c0) > COEFF_BOUND:
        return None
    if any(r != c1 * p + c0 for p, r in by_p.items()):
        return None
    return c1, c0


def calibrate(family, triple: str = "half", training_primes=(5, 7, 11, 13)) -> CalibrationModel:
    family = SurfaceFamily(family)
    if family not in OBSERVERS:
        raise BadParameter(f"{family.value} has no character-sum model")
    if not set(training_primes) <= {5, 7, 11, 13}:
        raise BadParameter("training primes must come from {5, 7, 11, 13}")
    observe = OBSERVERS[family]
    rows = []
    for p in training_primes:
        for a in valid_parameters(p):
            rows.append((p, a, observe(a, p), predicted_trace(a, p, triple), signature(a, p, triple)))

    residual_tables = []
    for s in (1, -1):
        groups: dict = {}
        for p, a, obs, tr, sig in rows:
            groups.setdefault(sig, []).append((p, obs - s * tr))
        coeffs = {}
        for sig, pts in groups.items():
            fit = _fit_group(pts)
            if fit is None:
                break
            coeffs[sig] = fit
        else:
            return CalibrationModel(family, triple, s, coeffs, tuple(training_primes))
        residual_tables.append((s, {sig: pts for sig, pts in groups.items()}))
    raise CalibrationFailure(f"no exact integer model for {family.value}", residual_tables)


@dataclass
class ValidationReport:
    family: SurfaceFamily
    passed: int
    total: int
    counterexample: tuple | None
    traces: dict

    @property
    def ok(self) -> bool:
        return self.counterexample is None and self.passed == self.total

    def __bool__(self):
        return self.ok


def validate(model: CalibrationModel, p_range=(17, 50)) -> ValidationReport:
    observe = OBSERVERS[model.family]
    passed = total = 0
    first = None
    traces = {}
    for p in primes_in(*p_range):
        for a in valid_parameters(p):
            total += 1
            obs = observe(a, p)
            pred = model.predict(a, p)
            traces[(p, a)] = model.extract_trace(obs, a, p)
            if pred == obs:
                passed += 1
            elif first is None:
                first = (p, a, obs, pred)
    return ValidationReport(model.family, passed, total, first, traces)


def compare_traces(r1: ValidationReport, r2: ValidationReport) -> list[tuple]:
    """Grid points where the two reports extract different traces."""
    keys = sorted(set(r1.traces) | set(r2.traces))
    return [(k, r1.traces.get(k), r2.traces.get(k)) for k in keys if r1.traces.get(k) != r2.traces.get(k)]


__all__ = [
    "CalibrationModel",
    "DworkReport",
    "SurfaceCount",
    "SurfaceFamily",
    "ValidationReport",
    "calibrate",
    "compare_traces",
    "count_double_cover_affine",
    "count_dwork_cone",
    "count_dwork_quartic",
    "count_triple_product_affine",
    "double_char_sum",
    "dwork_divisibility_check",
    "predicted_trace",
    "signature",
    "surface_count",
    "triple_char_sum",
    "triple_count_from_sum",
    "validate",
]
