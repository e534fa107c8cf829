"""Elliptic curve families, exhaustive point counts, isogenies and CM tests.

Curves are stored as lam * y^2 = x^3 + a2 x^2 + a4 x + a6.  Counting is the
plain O(q) character sum; over F_{p^2} the character is taken through the
norm to F_p.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import BadParameter, BadReduction, DomainMismatch, SingularFiber
from .finite_field import (
    Fp2Vec,
    PrimeField,
    PrimeFieldElement,
    QuadExtElement,
    QuadExtField,
    QuadFieldNumber,
    legendre,
    primes_in,
    reduce_quad,
    square_table,
)

log = logging.getLogger(__name__)

RATIONAL = "Q"


class CurveFamily(Enum):
    E_HALF = "E_half"
    E_THIRD = "E_third"
    E_QUARTER = "E_quarter"
    E_SIXTH = "E_sixth"
    C_HALF = "C_half"
    C_SIXTH = "C_sixth"

    @classmethod
    def for_triple(cls, name: str, kind: str = "E") -> "CurveFamily":
        try:
            return cls(f"{kind}_{name}")
        except ValueError:
            raise ValueError(f"no {kind}-family for triple {name!r}") from None

    @property
    def triple(self) -> str:
        return self.value.split("_", 1)[1]


def _as_family(family) -> CurveFamily:
    if isinstance(family, CurveFamily):
        return family
    if family in CurveFamily._value2member_map_:
        return CurveFamily(family)
    return CurveFamily.for_triple(family)


def _field_of(value):
    if isinstance(value, PrimeFieldElement):
        return PrimeField(value.p)
    if isinstance(value, QuadExtElement):
        return QuadExtField(value.p)
    if isinstance(value, (int, Fraction, QuadFieldNumber)):
        return RATIONAL
    raise TypeError(f"unsupported parameter type {type(value).__name__}")


def _coerce(value, fld):
    if fld == RATIONAL:
        return value if isinstance(value, QuadFieldNumber) else Fraction(value)
    return fld(value)


def cubic_discriminant(a2, a4, a6):
    return a2 * a2 * a4 * a4 - 4 * a4**3 - 4 * a2**3 * a6 - 27 * a6 * a6 + 18 * a2 * a4 * a6


@dataclass(frozen=True)
class WeierstrassCurve:
    """lam * y^2 = x^3 + a2*x^2 + a4*x + a6 over ``field``."""

    a2: object
    a4: object
    a6: object
    field: object = RATIONAL
    lam: object = 1

    def __post_init__(self):
        for name in ("a2", "a4", "a6", "lam"):
            object.__setattr__(self, name, _coerce(getattr(self, name), self.field))
        if self.lam == 0:
            raise SingularFiber("leading scalar is zero")
        if self.discriminant() == 0:
            raise SingularFiber(f"singular cubic ({self.a2}, {self.a4}, {self.a6}) over {self.field}")

    @classmethod
    def from_cubic(cls, c3, c2, c1, c0, field=RATIONAL, lam=1) -> "WeierstrassCurve":
        """lam*y^2 = c3 x^3 + c2 x^2 + c1 x + c0, made monic by dividing through by c3."""
        c3, c2, c1, c0, lam = (_coerce(v, field) for v in (c3, c2, c1, c0, lam))
        if c3 == 0:
            raise SingularFiber("cubic has vanishing leading coefficient")
        return cls(c2 / c3, c1 / c3, c0 / c3, field, lam / c3)

    def discriminant(self):
        return cubic_discriminant(self.a2, self.a4, self.a6)

    @property
    def p(self) -> int:
        if self.field == RATIONAL:
            raise DomainMismatch("curve is not over a finite field")
        return self.field.p

    @property
    def q(self) -> int:
        if self.field == RATIONAL:
            raise DomainMismatch("curve is not over a finite field")
        return self.field.q

    def coefficients(self):
        return (self.a2, self.a4, self.a6)

    def rhs(self, x):
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def descends(self) -> bool:
        """True if every coefficient lies in F_p."""
        if isinstance(self.field, PrimeField):
            return True
        if isinstance(self.field, QuadExtField):
            return all(c.y == 0 for c in (self.a2, self.a4, self.a6, self.lam))
        return False

    def base_change(self) -> "WeierstrassCurve":
        """The same curve viewed over F_{p^2}."""
        if isinstance(self.field, QuadExtField):
            return self
        if not isinstance(self.field, PrimeField):
            raise DomainMismatch("base change needs a curve over F_p")
        f2 = QuadExtField(self.field.p)
        return WeierstrassCurve(*(f2(c) for c in self.coefficients()), f2, f2(self.lam))

    def descend(self) -> "WeierstrassCurve":
        if isinstance(self.field, PrimeField):
            return self
        if not self.descends():
            raise DomainMismatch("curve is not defined over F_p")
        fp = PrimeField(self.field.p)
        return WeierstrassCurve(*(fp(c) for c in self.coefficients()), fp, fp(self.lam))

    def twist(self, d) -> "WeierstrassCurve":
        """The quadratic twist d*lam*y^2 = f(x)."""
        return WeierstrassCurve(self.a2, self.a4, self.a6, self.field, self.lam * d)

    def key(self) -> str:
        if self.field == RATIONAL:
            raise DomainMismatch("only curves over finite fields have cache keys")
        parts = (c.key() for c in (self.lam, self.a2, self.a4, self.a6))
        return f"q={self.q};p={self.p};" + ";".join(parts)

    def __str__(self):
        lead = "" if self.lam == 1 else f"{self.lam}*"
        rhs = "x^3"
        for c, mono in ((self.a2, "x^2"), (self.a4, "x"), (self.a6, "")):
            if c != 0:
                rhs += f" + {c}{mono}"
        return f"{lead}y^2 = {rhs} over {self.field}"


def curve_at(family, param, field=None) -> WeierstrassCurve:
    """The family member at ``param`` in expanded monic form."""
    fam = _as_family(family)
    fld = field if field is not None else _field_of(param)
    s = _coerce(param, fld)
    quarter = Fraction(1, 4)
    if fam is CurveFamily.E_HALF:
        coeffs = (-(1 + s), s, 0)
    elif fam is CurveFamily.E_THIRD:
        c = 4 - 4 * s
        coeffs = (9, 6 * c, c * c)
    elif fam is CurveFamily.E_QUARTER:
        coeffs = (-2, 1 - s, 0)
    elif fam is CurveFamily.E_SIXTH:
        # 4x^3 - 3x + 1 - 2s; (x, y) -> (x, y/2) keeps every count
        coeffs = (0, -3 * quarter, (1 - 2 * s) * quarter)
    elif fam is CurveFamily.C_HALF:
        if s - 1 == 0:
            raise SingularFiber("t = 1 is a pole of t/(t-1)")
        coeffs = (-2, s / (s - 1), 0)
    else:
        u = 1 - s
        coeffs = (0, -3 * u * quarter, u * u * quarter)
    return WeierstrassCurve(*coeffs, field=fld)


# counting -------------------------------------------------------------------

_MEMORY: dict[str, int] = {}
_PERSISTENT = None
STATS = {"computed": 0, "memory": 0, "persistent": 0}


def set_persistent_cache(cache) -> None:
    """Install an object with ``get(key) -> int | None`` and ``put(key, count)``."""
    global _PERSISTENT
    _PERSISTENT = cache


def clear_memory_cache() -> None:
    _MEMORY.clear()


def _count_fp(curve: WeierstrassCurve) -> int:
    p = curve.p
    x = np.arange(p, dtype=np.int64)
    r = np.full(p, 1, dtype=np.int64)
    for c in curve.coefficients():
        r = (r * x + c.value) % p
    total = int(square_table(p)[r].sum(dtype=np.int64))
    return p + 1 + legendre(curve.lam.value, p) * total


def _count_fp2(curve: WeierstrassCurve) -> int:
    p = curve.p
    x = Fp2Vec.all_elements(p)
    r = x + curve.a2
    r = r * x + curve.a4
    r = r * x + curve.a6
    total = int(r.chi().sum(dtype=np.int64))
    return p * p + 1 + legendre(curve.lam.norm(), p) * total


def count_points_record(curve: WeierstrassCurve) -> tuple[int, str, str]:
    """(count, cache key, source) with source in computed/memory/persistent."""
    key = curve.key()
    if key in _MEMORY:
        STATS["memory"] += 1
        return _MEMORY[key], key, "memory"
    source = "computed"
    n = _PERSISTENT.get(key) if _PERSISTENT is not None else None
    if n is not None:
        source = "persistent"
    else:
        n = _count_fp(curve) if isinstance(curve.field, PrimeField) else _count_fp2(curve)
        if _PERSISTENT is not None:
            _PERSISTENT.put(key, n)
    STATS[source] += 1
    _MEMORY[key] = n
    return n, key, source


def count_points(curve: WeierstrassCurve) -> int:
    """#E(F_q) including the point at infinity."""
    return count_points_record(curve)[0]


def count_points_naive(curve: WeierstrassCurve) -> int:
    """Element-by-element count with scalar field arithmetic (slow oracle)."""
    n = 1
    lam_inv = 1 / curve.lam
    for x in curve.field.elements():
        v = curve.rhs(x) * lam_inv
        n += 1 if v.is_zero() else (2 if v.is_square() else 0)
    return n


def trace_ap(curve: WeierstrassCurve) -> int:
    c = curve.descend()
    return c.p + 1 - count_points(c)


def trace_ap2(curve: WeierstrassCurve, path: str | None = None) -> int:
    """a_{p^2}; ``path`` "Fp" uses a_p^2 - 2p, "Fp2" counts over F_{p^2}."""
    if path is None:
        path = "Fp" if curve.descends() else "Fp2"
    p = curve.p
    if path == "Fp":
        ap = trace_ap(curve)
        return ap * ap - 2 * p
    if path != "Fp2":
        raise ValueError(f"unknown path {path!r}")
    return p * p + 1 - count_points(curve.base_change())


def is_supersingular(curve: WeierstrassCurve) -> bool:
    if isinstance(curve.field, PrimeField):
        return trace_ap(curve) % curve.p == 0
    return trace_ap2(curve) % curve.p == 0


def hasse_ok(curve: WeierstrassCurve) -> bool:
    a = curve.q + 1 - count_points(curve)
    return a * a <= 4 * curve.q


# invariants -----------------------------------------------------------------


def j_invariant(curve: WeierstrassCurve):
    """1728 g2^3 / Delta, from the short model of the monic cubic."""
    a2, a4, a6 = curve.coefficients()
    b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
    b8 = 4 * a2 * a6 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    if disc == 0:
        raise SingularFiber("zero discriminant")
    return c4**3 / disc


S = sp.Symbol("s")


@dataclass(frozen=True)
class NormalForm:
    """Y^2 = 4X^3 - g2 X - g3 with X = u^2 (x + shift), Y = u^3 * y_scale * y."""

    family: CurveFamily
    g2: sp.Expr
    g3: sp.Expr
    shift: sp.Expr
    y_scale: int
    u: int = 1

    @property
    def discriminant(self) -> sp.Expr:
        return sp.expand(self.g2**3 - 27 * self.g3**2)

    def to_short(self, x, y):
        return (self.u**2 * (x + self.shift), self.u**3 * self.y_scale * y)

    def curve_at(self, s, field=None) -> WeierstrassCurve:
        fld = field if field is not None else _field_of(s)
        s = _coerce(s, fld)
        g2, g3 = eval_poly(self.g2, s), eval_poly(self.g3, s)
        return WeierstrassCurve(0, -g2 * Fraction(1, 4), -g3 * Fraction(1, 4), fld)


def eval_poly(expr: sp.Expr, value, var: sp.Symbol = S):
    """Horner evaluation of a polynomial with rational coefficients at a field element."""
    coeffs = sp.Poly(expr, var).all_coeffs()
    acc = 0
    for c in coeffs:
        acc = acc * value + Fraction(int(c.p), int(c.q))
    return acc


@lru_cache(maxsize=None)
def normal_form(family) -> NormalForm:
    fam = _as_family(family)
    x, s = sp.Symbol("x"), S
    cubics = {
        CurveFamily.E_HALF: x * (x - 1) * (x - s),
        CurveFamily.E_THIRD: x**3 + (3 * x + 4 - 4 * s) ** 2,
        CurveFamily.E_QUARTER: x * (x**2 - 2 * x + 1 - s),
    }
    if fam is CurveFamily.E_SIXTH:
        g2, g3, shift, y_scale = sp.Integer(3), 2 * s - 1, sp.Integer(0), 1
    elif fam in cubics:
        poly = sp.Poly(sp.expand(cubics[fam]), x)
        shift = poly.coeff_monomial(x**2) / 3
        depressed = sp.Poly(sp.expand(cubics[fam].subs(x, x - shift)), x)
        g2 = sp.expand(-4 * depressed.coeff_monomial(x))
        g3 = sp.expand(-4 * depressed.coeff_monomial(1))
        y_scale = 2
    else:
        raise ValueError(f"no normal form for {fam.value}")
    nf = NormalForm(fam, g2, g3, shift, y_scale)
    disc = nf.discriminant
    if disc.subs(s, 0) != 0 or g2.subs(s, 0) * g3.subs(s, 0) == 0:
        raise AssertionError(f"normal form of {fam.value} violates the degeneration conditions")
    return nf


# isogenies ------------------------------------------------------------------


def _embed(b, p: int) -> QuadExtElement:
    if isinstance(b, QuadExtElement):
        return b
    if isinstance(b, PrimeFieldElement):
        return QuadExtElement(b.value, 0, p)
    return QuadExtField(p)(b)


def _horner(coeffs, x):
    acc = x * 0 + coeffs[0]
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


def isogeny_models(family, b, convention: str = "source_b"):
    """(source cubic, target scalar, target cubic, phi, psi, needs x != 0).

    Cubics are coefficient lists, highest degree first, for lam*y^2 = cubic.
    The map is (x, y) -> (phi(x), y*psi(x)).
    """
    fam = _as_family(family)
    one = b * 0 + 1
    if fam is CurveFamily.E_HALF:
        src = [one, -(1 + b), b, 0]
        tgt = [one, b - 2, 1 - b, 0]
        return src, -1, tgt, (lambda x: 1 - x), (lambda x: x * 0 + 1), False
    if fam is CurveFamily.E_THIRD:
        c = 4 - 4 * b
        if convention == "source_b":
            src = [one, 9, 24 * b, 16 * b * b]
        elif convention == "family_model":
            src = [one, 9, 6 * c, c * c]
        else:
            raise ValueError(f"unknown convention {convention!r}")
        tgt = [one, 9, 6 * c, c * c]

        def phi(x):
            return _horner([one, 12, 48 * b, 64 * b * b], x) / (x * x * (-3))

        def psi(x):
            return _horner([one, 0, -48 * b, -128 * b * b], x) / (x * x * x * 9)

        return src, -3, tgt, phi, psi, True
    if fam is CurveFamily.E_QUARTER:
        src = [one, -2, 1 - b, 0]
        tgt = [one, -2, b, 0]
        half = Fraction(1, 2)

        def phi(x):
            return x * (-half) + 1 + (b - 1) * half / x

        def psi(x):
            return (x * x + b - 1) / (x * x * 4)

        return src, -2, tgt, phi, psi, True
    if fam is CurveFamily.E_SIXTH:
        src = [4 * one, 0, -3, 1 - 2 * b]
        tgt = [4 * one, 0, -3, 2 * b - 1]
        return src, -1, tgt, (lambda x: -x), (lambda x: x * 0 + 1), False
    raise ValueError(f"no isogeny for {fam.value}")


@dataclass
class IsogenyCheck:
    pointwise: bool
    counts_equal: bool
    source_count: int
    target_count: int
    points_checked: int

    def __bool__(self):
        return self.pointwise and self.counts_equal


def verify_isogeny(family, b, p: int, convention: str = "source_b") -> IsogenyCheck:
    """Check the explicit map from the family member at b to the twisted model at 1-b."""
    b = _embed(b, p)
    f2 = QuadExtField(p)
    src, lam_t, tgt, phi, psi, needs_x = isogeny_models(family, b, convention)
    source = WeierstrassCurve.from_cubic(*src, field=f2)
    target = WeierstrassCurve.from_cubic(*tgt, field=f2, lam=lam_t)

    xs = Fp2Vec.all_elements(p)
    fx = _horner(src, xs)
    keep = fx.chi() >= 0
    if needs_x:
        keep &= ~xs.is_zero()
    xs, fx = xs[keep], fx[keep]
    ps = psi(xs)
    lhs = ps * ps * fx * lam_t
    rhs = _horner(tgt, phi(xs))
    pointwise = bool(np.all(lhs.equals(rhs)))

    ns, nt = count_points(source), count_points(target)
    return IsogenyCheck(pointwise, ns == nt, ns, nt, len(xs))


# CM heuristic ---------------------------------------------------------------

CM_TABLE = {
    "half": [Fraction(v) for v in (-1, 4, Fraction(1, 4), -8, Fraction(-1, 8), 64, Fraction(1, 64))],
    "third": [
        Fraction(-4), Fraction(1, 2), Fraction(-1, 2**4), Fraction(-1, 2**10),
        Fraction(-(3**2), 2**4), Fraction(3**3, 2**4), Fraction(2, 3**3), Fraction(3**3, 2),
        Fraction(-1, 2**4 * 5), Fraction(4, 5**3), Fraction(-1, 2**4 * 5**6),
        Fraction(-1, 2**3 * 3**3 * 7),
    ],
    "quarter": [
        Fraction(-1, 2**2), Fraction(1, 3**2), Fraction(1, 3**4), Fraction(-1, 2**4 * 3),
        Fraction(-(2**4), 3**2), Fraction(-1, 2**2 * 3**4), Fraction(2**5, 3**4),
        Fraction(2**8, 3**4), Fraction(-1, 2**6 * 3**4 * 5), Fraction(1, 7**4),
        Fraction(-1, 2**2 * 3**4 * 7**4), Fraction(-(2**8), 3**4 * 7**2),
        Fraction(1, 3**4 * 11**2), Fraction(1, 3**8 * 11**4),
    ],
    "sixth": [
        Fraction(-1, 2**9), Fraction(-(3**3), 2**9), Fraction(2**2, 5**3),
        Fraction(-(2**6), 5**3), Fraction(-1, 2**12 * 5**3), Fraction(-(3**2), 2**9 * 5**3),
        Fraction(3**3, 5**3), Fraction(2**3, 11**3), Fraction(-1, 2**9 * 5**3 * 11**3),
        Fraction(2**6, 5**3 * 17**3), Fraction(-1, 2**12 * 5**3 * 23**3 * 29**3),
    ],
}

CM_CONTROLS = [Fraction(2), Fraction(3), Fraction(5), Fraction(-2), Fraction(7, 3)]

CM_THRESHOLD = 0.30


def b_over_quadratic_field(a) -> Fraction | QuadFieldNumber:
    """b = (1 - sqrt(1 - a))/2 in Q or Q(sqrt(1 - a))."""
    root = QuadFieldNumber.sqrt_of(1 - Fraction(a))
    return (1 - root) * Fraction(1, 2)


@dataclass
class CMDecision:
    family: str
    a: Fraction
    bound: int
    cm: bool
    supersingular: list[int] = field(default_factory=list)
    ordinary: list[int] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    @property
    def tested(self) -> int:
        return len(self.supersingular) + len(self.ordinary)

    @property
    def fraction(self) -> float:
        return len(self.supersingular) / self.tested if self.tested else 0.0


def _bad_prime(p: int, a: Fraction, b) -> bool:
    for v in (a, 1 - a):
        if v.numerator % p == 0 or v.denominator % p == 0:
            return True
    return isinstance(b, QuadFieldNumber) and b.D % p == 0


def is_cm_heuristic(family, a, bound: int = 500) -> CMDecision:
    """Supersingular-prime density test for CM of the family member at b."""
    fam = _as_family(family)
    a = Fraction(a)
    if a in (0, 1):
        raise BadParameter("a must avoid 0 and 1")
    b = b_over_quadratic_field(a)
    result = CMDecision(fam.triple, a, bound, False)
    for p in primes_in(5, bound):
        if _bad_prime(p, a, b):
            result.skipped.append(p)
            log.debug("skip p=%d for a=%s: bad reduction", p, a)
            continue
        try:
            curve = curve_at(fam, reduce_quad(b, p))
        except (BadReduction, SingularFiber) as exc:
            result.skipped.append(p)
            log.debug("skip p=%d for a=%s: %s", p, a, exc)
            continue
        (result.supersingular if is_supersingular(curve) else result.ordinary).append(p)
    result.cm = result.fraction > CM_THRESHOLD
    return result


__all__ = [
    "CM_CONTROLS",
    "CM_TABLE",
    "CurveFamily",
    "CMDecision",
    "IsogenyCheck",
    "NormalForm",
    "WeierstrassCurve",
    "b_over_quadratic_field",
    "count_points",
    "count_points_naive",
    "count_points_record",
    "curve_at",
    "eval_poly",
    "hasse_ok",
    "is_cm_heuristic",
    "is_supersingular",
    "isogeny_models",
    "j_invariant",
    "normal_form",
    "set_persistent_cache",
    "trace_ap",
    "trace_ap2",
    "verify_isogeny",
]
