"""Predicted Frobenius cubic on the rank-3 transcendental piece at t = a.

The cubic is (1 - eps*p*T)(1 - A'*T + p^2 T^2) with eps = chi*(1-a / p) and
A' = chi*A, where A comes from point counts on E_{alpha, b} and
b = (1 - sqrt(1 - a))/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .elliptic import CurveFamily, count_points_record, curve_at
from .errors import (
    BadParameter,
    BadReduction,
    HasseViolation,
    InadmissibleTriple,
    SingularFiber,
    SupersingularInput,
)
from .finite_field import (
    PrimeField,
    PrimeFieldElement,
    QuadExtElement,
    QuadExtField,
    is_prime,
    legendre,
    nonresidue,
    rational_mod,
    sqrt_mod,
)
from .qseries import cached_hg_series, get_triple, truncate_below, truncate_mod


class SplitCase(Enum):
    SPLIT = "SplitField"
    INERT_ORDINARY = "InertOrdinary"
    INERT_SUPERSINGULAR = "InertSupersingular"


class ChiSign(int, Enum):
    PLUS = 1
    MINUS = -1


D_ALPHA = {"half": -1, "third": -3, "quarter": -2, "sixth": -1}

# a_p(E_b) = legendre(k, p) * F_{<p}(b) mod p; found by exhaustive counts
HASSE_SIGN = {"half": -1, "third": -3, "quarter": 1, "sixth": 6}


def _name(triple) -> str:
    t = get_triple(triple)
    if t.name is None:
        raise InadmissibleTriple(f"{t} is not one of the built-in triples")
    return t.name


def d_alpha(triple) -> int:
    return D_ALPHA[_name(triple)]


def hasse_sign(triple, p: int) -> int:
    return legendre(HASSE_SIGN[_name(triple)], p)


@dataclass(frozen=True)
class CharPoly3:
    """1 + c1 T + c2 T^2 + c3 T^3 = (1 - linear_sign*q*T)(1 - quad_trace*T + q^2 T^2)."""

    c1: int
    c2: int
    c3: int
    q: int
    linear_sign: int
    quad_trace: int
    case: SplitCase | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_factors(cls, linear_sign: int, quad_trace: int, q: int, **extra) -> "CharPoly3":
        e, a = linear_sign, quad_trace
        return cls(-e * q - a, q * q + e * q * a, -e * q**3, q, e, a, **extra)

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return (self.c1, self.c2, self.c3)

    def factor(self) -> tuple[int, int] | None:
        """(linear_sign, quad_trace) recovered from the coefficients alone, or None."""
        return factor_cubic(self.c1, self.c2, self.c3, self.q)

    def __str__(self):
        e = "-" if self.linear_sign > 0 else "+"
        a = self.quad_trace
        mid = f"- {a}T" if a >= 0 else f"+ {-a}T"
        return f"(1 {e} {self.q}T)(1 {mid} + {self.q ** 2}T^2)"


def factor_cubic(c1: int, c2: int, c3: int, q: int) -> tuple[int, int] | None:
    for e in (1, -1):
        # the cubic vanishes at T = 1/(e q)
        if q**3 + e * c1 * q * q + c2 * q + e * c3 == 0:
            if c3 % (e * q) != 0 or -c3 // (e * q) != q * q:
                continue
            return e, -(c1 + e * q)
    return None


def check_parameter(a, p: int) -> int:
    if not is_prime(p) or p <= 3:
        raise BadParameter(f"p must be a prime > 3, got {p}")
    try:
        r = rational_mod(a, p)
    except BadReduction as exc:
        raise BadParameter(str(exc)) from None
    if r * (1 - r) % p == 0:
        raise BadParameter(f"a(1-a) = 0 mod {p} for a = {a}")
    return r


def b_mod_p(a, p: int, other_root: bool = False) -> PrimeFieldElement | QuadExtElement:
    """b = (1 - sqrt(1-a))/2 in F_p or F_{p^2}; ``other_root`` gives 1 - b."""
    u = (1 - rational_mod(a, p)) % p
    half = pow(2, -1, p)
    sign = -1 if other_root else 1
    if legendre(u, p) == 1:
        r = sqrt_mod(u, p).value
        return PrimeFieldElement((1 - sign * r) * half, p)
    d = nonresidue(p)
    y = sqrt_mod(u * pow(d, -1, p), p).value
    return QuadExtElement(half, -sign * y * half, p)


@dataclass
class ADetail:
    A: int
    case: SplitCase
    b: object
    trace: int
    counts: list = field(default_factory=list)


def compute_A_detail(triple, a, p: int, other_root: bool = False) -> ADetail:
    name = _name(triple)
    check_parameter(a, p)
    b = b_mod_p(a, p, other_root)
    fam = CurveFamily.for_triple(name)
    if isinstance(b, PrimeFieldElement):
        curve = curve_at(fam, b, PrimeField(p))
        n, key, src = count_points_record(curve)
        ap = p + 1 - n
        return ADetail(ap * ap - 2 * p, SplitCase.SPLIT, b, ap, [(key, n, src)])
    curve = curve_at(fam, b, QuadExtField(p))
    n, key, src = count_points_record(curve)
    ap2 = p * p + 1 - n
    if ap2 % p == 0:
        return ADetail(2 * p, SplitCase.INERT_SUPERSINGULAR, b, ap2, [(key, n, src)])
    A = legendre(D_ALPHA[name], p) * ap2
    return ADetail(A, SplitCase.INERT_ORDINARY, b, ap2, [(key, n, src)])


def compute_A(triple, a, p: int, other_root: bool = False) -> tuple[int, SplitCase]:
    r = compute_A_detail(triple, a, p, other_root)
    return r.A, r.case


def predict_charpoly(triple, a, p: int, chi: int = 1) -> CharPoly3:
    detail = compute_A_detail(triple, a, p)
    eps = legendre(1 - rational_mod(a, p), p) * chi
    return CharPoly3.from_factors(
        eps, chi * detail.A, p, case=detail.case,
        provenance={"via": "E", "counts": detail.counts},
    )


def predict_charpoly_C(triple, a, p: int, chi: int = 1) -> CharPoly3:
    name = _name(triple)
    if name not in ("half", "sixth"):
        raise BadParameter(f"the C-route exists only for half and sixth, not {name}")
    if is_prime(p) and p > 3 and Fraction(a).denominator % p and rational_mod(a, p) == 1:
        raise SingularFiber(f"C_{name} has a pole at t = 1 (a = {a}, p = {p})")
    r = check_parameter(a, p)
    curve = curve_at(CurveFamily.for_triple(name, "C"), r, PrimeField(p))
    n, key, src = count_points_record(curve)
    ap = p + 1 - n
    ell = legendre(1 - r, p)
    return CharPoly3.from_factors(
        ell * chi, ell * chi * (ap * ap - 2 * p), p,
        provenance={"via": "C", "counts": [(key, n, src)]},
    )


def sym2_charpoly(a_q: int, q: int) -> CharPoly3:
    if a_q * a_q > 4 * q:
        raise HasseViolation(f"|a_q| = {abs(a_q)} exceeds 2*sqrt({q})")
    return CharPoly3.from_factors(1, a_q * a_q - 2 * q, q)


@dataclass
class WeilResult:
    ok: bool
    reason: str = "ok"

    def __bool__(self):
        return self.ok


def verify_weil(cp: CharPoly3, p: int, chi: int = 1) -> WeilResult:
    if cp.c3 not in (p**3, -(p**3)):
        return WeilResult(False, "determinant")
    fac = factor_cubic(cp.c1, cp.c2, cp.c3, p)
    if fac is None:
        return WeilResult(False, "no-factorization")
    eps, A = fac
    if abs(A) > 2 * p:
        return WeilResult(False, "quadratic-not-weil")
    if cp.linear_sign != eps or cp.quad_trace != A:
        return WeilResult(False, "factor-mismatch")
    if cp.case is SplitCase.INERT_SUPERSINGULAR:
        # roots {chi p, chi p, -chi p}
        if A != 2 * chi * p or eps != -chi:
            return WeilResult(False, "supersingular-roots")
        if (-cp.c1 - chi * p) % (p * p) != 0:
            return WeilResult(False, "supersingular-trace")
    return WeilResult(True)


@dataclass
class UnitRootReport:
    triple: str
    a: Fraction
    p: int
    case: SplitCase
    checks: dict
    values: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self):
        return self.ok


def truncated_hasse(triple, p: int):
    """F_{alpha0, alpha1}(t) truncated below t^p, reduced mod p."""
    a0, a1 = get_triple(_name(triple)).elliptic_pair
    f = cached_hg_series((a0, a1), (1,), p)
    return truncate_below(truncate_mod(f, p), p)


def verify_unit_root_congruences(triple, a, p: int) -> UnitRootReport:
    name = _name(triple)
    detail = compute_A_detail(name, a, p)
    if detail.case is SplitCase.INERT_SUPERSINGULAR:
        raise SupersingularInput(f"E_b is supersingular at p={p}")
    F = truncated_hasse(name, p)
    b = detail.b
    checks, values = {}, {}
    if detail.case is SplitCase.SPLIT:
        fb = F(b)
        if detail.trace % p == 0 or fb.is_zero():
            raise SupersingularInput(f"E_b is supersingular at p={p}")
        kappa = hasse_sign(name, p)
        values.update(ap=detail.trace, F_b=fb.value, kappa=kappa)
        checks["ap"] = fb * kappa == detail.trace
        checks["ap_squared"] = fb * fb == detail.trace * detail.trace
    else:
        fb, fc = F(b), F(1 - b)
        if fb.is_zero() or fc.is_zero():
            raise SupersingularInput(f"E_b is supersingular at p={p}")
        ratio = fb / fc
        sign = legendre(D_ALPHA[name], p)
        values.update(ap2=detail.trace, F_b=fb.to_pair(), F_1mb=fc.to_pair(), ratio=ratio.to_pair())
        checks["ap2_product"] = fb * fc == detail.trace
        checks["ratio_sign"] = ratio == sign
    return UnitRootReport(name, Fraction(a), p, detail.case, checks, values)


__all__ = [
    "ADetail",
    "CharPoly3",
    "ChiSign",
    "D_ALPHA",
    "HASSE_SIGN",
    "SplitCase",
    "UnitRootReport",
    "WeilResult",
    "b_mod_p",
    "check_parameter",
    "compute_A",
    "compute_A_detail",
    "d_alpha",
    "factor_cubic",
    "hasse_sign",
    "predict_charpoly",
    "predict_charpoly_C",
    "sym2_charpoly",
    "truncated_hasse",
    "verify_unit_root_congruences",
    "verify_weil",
]
