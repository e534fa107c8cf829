"""Truncated power series over Q or Z/p^k, and hypergeometric series.

Series are immutable.  The scalar domain of a series is either exact
rationals (:class:`fractions.Fraction`) or residues modulo a prime power
(:class:`ModPrimePower`); the two never mix implicitly, :func:`truncate_mod`
is the only bridge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    DenominatorDivisibleByP,
    DomainMismatch,
    InadmissibleTriple,
    NonInvertibleModulus,
    NonUnitDivisor,
    NonzeroConstantInComposition,
    PoleInDenominatorParameter,
    TruncationBeyondOrder,
)

Rational = Fraction


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class ModPrimePower:
    """Residue class modulo p**k."""

    residue: int
    p: int
    k: int = 1

    def __post_init__(self):
        if self.p < 3 or self.p % 2 == 0:
            raise ValueError("p must be an odd prime")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @classmethod
    def from_rational(cls, x, p: int, k: int = 1) -> "ModPrimePower":
        x = as_rational(x)
        if x.denominator % p == 0:
            raise NonInvertibleModulus(f"{x} has denominator divisible by {p}")
        m = p**k
        return cls(x.numerator * pow(x.denominator, -1, m), p, k)

    def _coerce(self, other) -> int:
        if isinstance(other, ModPrimePower):
            if (other.p, other.k) != (self.p, self.k):
                raise DomainMismatch("residues modulo different prime powers")
            return other.residue
        if isinstance(other, int):
            return other
        raise DomainMismatch(f"no implicit promotion from {type(other).__name__}")

    def __add__(self, other):
        return ModPrimePower(self.residue + self._coerce(other), self.p, self.k)

    __radd__ = __add__

    def __sub__(self, other):
        return ModPrimePower(self.residue - self._coerce(other), self.p, self.k)

    def __rsub__(self, other):
        return ModPrimePower(self._coerce(other) - self.residue, self.p, self.k)

    def __mul__(self, other):
        return ModPrimePower(self.residue * self._coerce(other), self.p, self.k)

    __rmul__ = __mul__

    def __neg__(self):
        return ModPrimePower(-self.residue, self.p, self.k)

    def inverse(self) -> "ModPrimePower":
        if self.residue % self.p == 0:
            raise NonInvertibleModulus(f"{self.residue} is not a unit mod {self.p}^{self.k}")
        return ModPrimePower(pow(self.residue, -1, self.modulus), self.p, self.k)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = ModPrimePower(other, self.p, self.k)
        self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ModPrimePower(self._coerce(other), self.p, self.k) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        if isinstance(other, ModPrimePower):
            return (self.residue, self.p, self.k) == (other.residue, other.p, other.k)
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p, self.k))

    def __int__(self):
        return self.residue

    def is_zero(self) -> bool:
        return self.residue == 0


def _domain(c):
    if isinstance(c, ModPrimePower):
        return ("mod", c.p, c.k)
    return ("Q",)


def _zero_like(c):
    if isinstance(c, ModPrimePower):
        return ModPrimePower(0, c.p, c.k)
    return Fraction(0)


def _one_like(c):
    if isinstance(c, ModPrimePower):
        return ModPrimePower(1, c.p, c.k)
    return Fraction(1)


def _is_zero(c) -> bool:
    return c == 0


def _scaled(coeffs) -> tuple[list[int], int]:
    den = math.lcm(*(c.denominator for c in coeffs))
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def _rational_convolution(a, b) -> list[Fraction]:
    # integer convolution over a common denominator is much cheaper than Fraction sums
    A, da = _scaled(a)
    B, db = _scaled(b)
    den = da * db
    out = []
    for k in range(len(A)):
        acc = 0
        for i in range(k + 1):
            acc += A[i] * B[k - i]
        out.append(Fraction(acc, den))
    return out


class TruncatedSeries:
    """c_0 + c_1 t + ... + c_{N-1} t^{N-1} + O(t^N)."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(Fraction(c) if isinstance(c, int) else c for c in coeffs)
        if not coeffs:
            raise ValueError("a truncated series needs order >= 1")
        dom = _domain(coeffs[0])
        if any(_domain(c) != dom for c in coeffs):
            raise DomainMismatch("mixed scalar domains in one series")
        self._coeffs = coeffs

    @classmethod
    def zero(cls, order: int, like=None) -> "TruncatedSeries":
        z = _zero_like(like) if like is not None else Fraction(0)
        return cls([z] * order)

    @classmethod
    def one(cls, order: int, like=None) -> "TruncatedSeries":
        z = _zero_like(like) if like is not None else Fraction(0)
        o = _one_like(like) if like is not None else Fraction(1)
        return cls([o] + [z] * (order - 1))

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        """The series t (at least order 2 to be meaningful)."""
        return cls([Fraction(0), Fraction(1)] + [Fraction(0)] * max(0, order - 2))[:order]

    @classmethod
    def from_polynomial(cls, coeffs, order: int) -> "TruncatedSeries":
        coeffs = [as_rational(c) for c in coeffs][:order]
        return cls(coeffs + [Fraction(0)] * (order - len(coeffs)))

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def order(self) -> int:
        return len(self._coeffs)

    @property
    def domain(self):
        return _domain(self._coeffs[0])

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return TruncatedSeries(self._coeffs[i])
        return self._coeffs[i]

    def __repr__(self):
        terms = ", ".join(str(c) if not isinstance(c, ModPrimePower) else str(c.residue)
                          for c in self._coeffs[:6])
        more = ", ..." if self.order > 6 else ""
        return f"TruncatedSeries([{terms}{more}], order={self.order})"

    def _check(self, other: "TruncatedSeries"):
        if self.domain != other.domain:
            raise DomainMismatch("series over different scalar domains")

    def _lift(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, ModPrimePower)):
            if isinstance(other, Fraction) and self.domain != ("Q",):
                raise DomainMismatch("rational scalar with modular series")
            c0 = self._coeffs[0] * 0 + other
            return TruncatedSeries([c0] + [_zero_like(self._coeffs[0])] * (self.order - 1))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.domain == other.domain and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def agrees_with(self, other: "TruncatedSeries", order: int | None = None) -> bool:
        self._check(other)
        n = min(self.order, other.order) if order is None else order
        return self._coeffs[:n] == other._coeffs[:n]

    def first_difference(self, other: "TruncatedSeries", order: int | None = None):
        """Index of the first differing coefficient, or None."""
        n = min(self.order, other.order) if order is None else order
        for i in range(n):
            if self._coeffs[i] != other._coeffs[i]:
                return i
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        return TruncatedSeries([a + b for a, b in zip(self._coeffs[:n], other._coeffs[:n])])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self._coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ModPrimePower)):
            if isinstance(other, Fraction) and self.domain != ("Q",):
                raise DomainMismatch("rational scalar with modular series")
            return TruncatedSeries([c * other for c in self._coeffs])
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check(other)
        n = min(self.order, other.order)
        a, b = self._coeffs, other._coeffs
        if self.domain == ("Q",):
            return TruncatedSeries(_rational_convolution(a[:n], b[:n]))
        zero = _zero_like(a[0])
        out = []
        for k in range(n):
            acc = zero
            for i in range(k + 1):
                ai = a[i]
                if not _is_zero(ai):
                    acc = acc + ai * b[k - i]
            out.append(acc)
        return TruncatedSeries(out)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        c0 = self._coeffs[0]
        try:
            inv0 = 1 / c0
        except (ZeroDivisionError, NonInvertibleModulus):
            raise NonUnitDivisor("divisor has non-invertible constant term") from None
        a = self._coeffs
        out = [inv0]
        for k in range(1, self.order):
            acc = _zero_like(c0)
            for i in range(1, k + 1):
                if not _is_zero(a[i]):
                    acc = acc + a[i] * out[k - i]
            out.append(-acc * inv0)
        return TruncatedSeries(out)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, ModPrimePower)):
            try:
                inv = 1 / other
            except (ZeroDivisionError, NonInvertibleModulus):
                raise NonUnitDivisor("division by a non-unit scalar") from None
            return self * inv
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers; use binomial_power for (1-t)^r")
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncatedSeries.one(self.order, like=self._coeffs[0])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise TruncationBeyondOrder(f"cannot extend order {self.order} to {order}")
        return TruncatedSeries(self._coeffs[:order])

    def shift(self, k: int = 1) -> "TruncatedSeries":
        """Multiply by t^k keeping the order."""
        zero = _zero_like(self._coeffs[0])
        return TruncatedSeries(([zero] * k + list(self._coeffs))[: self.order])

    def derivative(self) -> "TruncatedSeries":
        """d/dt; the result has order N-1."""
        if self.order == 1:
            return TruncatedSeries([_zero_like(self._coeffs[0])])
        return TruncatedSeries([i * c for i, c in enumerate(self._coeffs) if i > 0])

    def theta(self) -> "TruncatedSeries":
        """t d/dt; keeps the order."""
        return TruncatedSeries([i * c for i, c in enumerate(self._coeffs)])

    def divide_by_t(self) -> "TruncatedSeries":
        """f/t for f with zero constant term; the result has order N-1."""
        if not _is_zero(self._coeffs[0]):
            raise NonUnitDivisor("f/t needs f(0) = 0")
        return TruncatedSeries(self._coeffs[1:]) if self.order > 1 else self

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(t)), inner(0) must vanish."""
        self._check(inner)
        if not _is_zero(inner[0]):
            raise NonzeroConstantInComposition("inner series must have zero constant term")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        zero = _zero_like(self._coeffs[0])
        result = TruncatedSeries([zero] * n)
        # Horner from the top coefficient
        for c in reversed(self._coeffs[:n]):
            result = result * inner + c
        return result

    def substitute_monomial(self, c, k: int) -> "TruncatedSeries":
        """self(c t^k) at the same order."""
        zero = _zero_like(self._coeffs[0])
        out = [zero] * self.order
        power = _one_like(self._coeffs[0])
        for i, a in enumerate(self._coeffs):
            if i * k >= self.order:
                break
            out[i * k] = a * power
            power = power * c
        return TruncatedSeries(out)

    def evaluate(self, x):
        """Evaluate the underlying polynomial of the stored coefficients at x."""
        return Polynomial(self._coeffs)(x)

    def is_zero(self, order: int | None = None) -> bool:
        n = self.order if order is None else order
        return all(_is_zero(c) for c in self._coeffs[:n])


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def degree(self) -> int:
        d = len(self.coeffs) - 1
        while d > 0 and self.coeffs[d] == 0:
            d -= 1
        return d

    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            c = c.residue if isinstance(c, ModPrimePower) else c
            acc = c + 0 * x if acc is None else acc * x + c
        return acc if acc is not None else 0 * x


@dataclass(frozen=True)
class HGTriple:
    """Parameters (alpha_0, alpha_1, alpha_2) of 3F2(alpha; 1, 1; t)."""

    alpha: tuple

    def __post_init__(self):
        alpha = tuple(as_rational(a) for a in self.alpha)
        if len(alpha) != 3:
            raise ValueError("a triple has three parameters")
        if not all(0 < a < 1 for a in alpha):
            raise ValueError("parameters must lie in (0, 1)")
        object.__setattr__(self, "alpha", alpha)

    @property
    def name(self) -> str | None:
        for name, t in TRIPLES.items():
            if sorted(t.alpha) == sorted(self.alpha):
                return name
        return None

    @property
    def is_admissible(self) -> bool:
        return self.name is not None

    @property
    def dual(self) -> "HGTriple":
        """The triple (1 - alpha_i)."""
        return HGTriple(tuple(1 - a for a in self.alpha))

    @property
    def elliptic_pair(self) -> tuple:
        return self.alpha[:2]

    def elementary(self) -> tuple:
        a0, a1, a2 = self.alpha
        return (a0 + a1 + a2, a0 * a1 + a1 * a2 + a0 * a2, a0 * a1 * a2)

    def series(self, order: int) -> TruncatedSeries:
        return hg_series(self.alpha, (1, 1), order)

    def __str__(self):
        return "(" + ", ".join(str(a) for a in self.alpha) + ")"


TRIPLES = {
    "half": HGTriple((Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))),
    "third": HGTriple((Fraction(1, 3), Fraction(2, 3), Fraction(1, 2))),
    "quarter": HGTriple((Fraction(1, 4), Fraction(3, 4), Fraction(1, 2))),
    "sixth": HGTriple((Fraction(1, 6), Fraction(5, 6), Fraction(1, 2))),
}


def get_triple(name_or_triple) -> HGTriple:
    if isinstance(name_or_triple, HGTriple):
        return name_or_triple
    if isinstance(name_or_triple, (tuple, list)):
        return HGTriple(tuple(name_or_triple))
    try:
        return TRIPLES[name_or_triple]
    except KeyError:
        raise InadmissibleTriple(
            f"unknown triple {name_or_triple!r}; expected one of {sorted(TRIPLES)}"
        ) from None


def pochhammer(alpha, n: int) -> Fraction:
    """Rising factorial alpha (alpha+1) ... (alpha+n-1)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    alpha = as_rational(alpha)
    result = Fraction(1)
    for i in range(n):
        result *= alpha + i
    return result


def hg_series(num, den, order: int) -> TruncatedSeries:
    """Generalized hypergeometric series pFq(num; den; t) to the given order.

    The i! of the usual definition is always present; pass den=(1, 1) for
    F_alpha = 3F2(alpha; 1, 1; t).
    """
    num = [as_rational(a) for a in num]
    den = [as_rational(b) for b in den]
    for b in den:
        if b <= 0 and b.denominator == 1:
            raise PoleInDenominatorParameter(f"denominator parameter {b} is a non-positive integer")
    coeffs = []
    c = Fraction(1)
    for i in range(order):
        coeffs.append(c)
        step = Fraction(1, i + 1)
        for a in num:
            step *= a + i
        for b in den:
            step /= b + i
        c *= step
    return TruncatedSeries(coeffs)


def binomial_power(r, order: int) -> TruncatedSeries:
    """(1 - t)^r = sum binom(r, i) (-t)^i."""
    r = as_rational(r)
    coeffs = [Fraction(1)]
    for i in range(order - 1):
        coeffs.append(coeffs[-1] * (i - r) / (i + 1))
    return TruncatedSeries(coeffs)


def s_of_t(order: int) -> TruncatedSeries:
    """s = (1 - sqrt(1 - t)) / 2."""
    if order < 1:
        raise ValueError("order must be >= 1")
    root = binomial_power(Fraction(1, 2), order)
    return (1 - root) * Fraction(1, 2)


def truncate_mod(f: TruncatedSeries, p: int, k: int = 1) -> TruncatedSeries:
    if f.domain != ("Q",):
        raise DomainMismatch("truncate_mod expects a rational series")
    return TruncatedSeries([ModPrimePower.from_rational(c, p, k) for c in f.coeffs])


def truncate_below(f: TruncatedSeries, n: int) -> Polynomial:
    """The polynomial sum_{i<n} c_i t^i."""
    if n > f.order:
        raise TruncationBeyondOrder(f"f has order {f.order}, cannot take f_<{n}")
    return Polynomial(f.coeffs[:n])


def dwork_prime(alpha, p: int) -> Fraction:
    """(alpha + l) / p with l in [0, p) and alpha + l = 0 mod p."""
    alpha = as_rational(alpha)
    if alpha.denominator % p == 0:
        raise DenominatorDivisibleByP(f"{alpha} is not p-integral for p={p}")
    l = (-alpha.numerator * pow(alpha.denominator, -1, p)) % p
    return (alpha + l) / p


def dwork_period(triple, p: int) -> int:
    """Least m >= 1 with the m-th Dwork prime of the triple a permutation of it."""
    triple = get_triple(triple)
    if p <= 3:
        raise ValueError("p must be > 3")
    target = sorted(triple.alpha)
    current = list(triple.alpha)
    for m in range(1, 10 * p):
        current = [dwork_prime(a, p) for a in current]
        if sorted(current) == target:
            return m
    raise RuntimeError("Dwork prime orbit did not close")  # unreachable for rational alpha


def dwork_prime_triple(triple, p: int) -> HGTriple:
    triple = get_triple(triple)
    return HGTriple(tuple(dwork_prime(a, p) for a in triple.alpha))


@lru_cache(maxsize=512)
def _cached_hg(num: tuple, den: tuple, order: int) -> TruncatedSeries:
    return hg_series(num, den, order)


def cached_hg_series(num, den, order: int) -> TruncatedSeries:
    return _cached_hg(tuple(as_rational(a) for a in num), tuple(as_rational(b) for b in den), order)


__all__ = [
    "Rational",
    "ModPrimePower",
    "TruncatedSeries",
    "Polynomial",
    "HGTriple",
    "TRIPLES",
    "get_triple",
    "pochhammer",
    "hg_series",
    "cached_hg_series",
    "binomial_power",
    "s_of_t",
    "truncate_mod",
    "truncate_below",
    "dwork_prime",
    "dwork_period",
    "dwork_prime_triple",
]
