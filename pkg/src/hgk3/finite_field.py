"""Arithmetic in F_p, F_{p^2} = F_p(delta) and Q(sqrt D).

delta**2 = d where d is the smallest positive quadratic non-residue mod p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BadReduction, DomainMismatch, NonResidue, NotAUnit

MAX_PRIME = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    f = 3
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi."""
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


def legendre(n: int, p: int) -> int:
    """Quadratic character of n modulo the odd prime p."""
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def nonresidue(p: int) -> int:
    for d in range(2, p):
        if legendre(d, p) == -1:
            return d
    raise ValueError(f"no non-residue mod {p}")


def _tonelli_shanks(n: int, p: int) -> int:
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = nonresidue(p)
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_mod(n: int, p: int) -> "PrimeFieldElement":
    """Square root of n mod p, the representative in [0, p/2]."""
    n %= p
    if n == 0:
        return PrimeFieldElement(0, p)
    if legendre(n, p) != 1:
        raise NonResidue(f"{n} is not a square mod {p}")
    r = _tonelli_shanks(n, p)
    return PrimeFieldElement(min(r, p - r), p)


def rational_mod(x, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise BadReduction(f"{x} has denominator divisible by {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


def has_padic_sqrt(u, p: int) -> bool:
    """Whether the p-adic unit u has a square root in Z_p (Hensel)."""
    u = Fraction(u)
    if u.numerator % p == 0 or u.denominator % p == 0:
        raise NotAUnit(f"{u} is not a {p}-adic unit")
    return legendre(rational_mod(u, p), p) == 1


@dataclass(frozen=True)
class PrimeFieldElement:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _v(self, other) -> int:
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise DomainMismatch("elements of different prime fields")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return rational_mod(other, self.p)
        return None

    def __add__(self, other):
        if isinstance(other, QuadExtElement):
            return other + self
        v = self._v(other)
        return NotImplemented if v is None else PrimeFieldElement(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, QuadExtElement):
            return -(other - self)
        v = self._v(other)
        return NotImplemented if v is None else PrimeFieldElement(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._v(other)
        return NotImplemented if v is None else PrimeFieldElement(v - self.value, self.p)

    def __mul__(self, other):
        if isinstance(other, QuadExtElement):
            return other * self
        v = self._v(other)
        return NotImplemented if v is None else PrimeFieldElement(self.value * v, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.value, self.p)

    def inverse(self) -> "PrimeFieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return PrimeFieldElement(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        if isinstance(other, QuadExtElement):
            return other.inverse() * self
        v = self._v(other)
        if v is None:
            return NotImplemented
        return self * PrimeFieldElement(v, self.p).inverse()

    def __rtruediv__(self, other):
        v = self._v(other)
        return NotImplemented if v is None else PrimeFieldElement(v, self.p) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PrimeFieldElement(pow(self.value, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, QuadExtElement):
            return other == self
        v = self._v(other)
        if v is None:
            return NotImplemented
        return (self.value - v) % self.p == 0

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"

    def __str__(self):
        return str(self.value)

    def is_zero(self) -> bool:
        return self.value == 0

    def is_square(self) -> bool:
        return legendre(self.value, self.p) >= 0

    def to_pair(self) -> tuple[int, int]:
        return (self.value, 0)

    def key(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class QuadExtElement:
    """x + y*delta in F_{p^2}, delta**2 = d."""

    x: int
    y: int
    p: int
    d: int = 0

    def __post_init__(self):
        d = self.d or nonresidue(self.p)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "x", self.x % self.p)
        object.__setattr__(self, "y", self.y % self.p)

    @classmethod
    def delta(cls, p: int) -> "QuadExtElement":
        return cls(0, 1, p)

    def _pair(self, other):
        if isinstance(other, QuadExtElement):
            if (other.p, other.d) != (self.p, self.d):
                raise DomainMismatch("elements of different quadratic extensions")
            return other.x, other.y
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise DomainMismatch("elements over different primes")
            return other.value, 0
        if isinstance(other, int):
            return other, 0
        if isinstance(other, Fraction):
            return rational_mod(other, self.p), 0
        return None

    def _new(self, x, y):
        return QuadExtElement(x, y, self.p, self.d)

    def __add__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(self.x + o[0], self.y + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(self.x - o[0], self.y - o[1])

    def __rsub__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(o[0] - self.x, o[1] - self.y)

    def __mul__(self, other):
        o = self._pair(other)
        if o is None:
            return NotImplemented
        u, v = o
        return self._new(self.x * u + self.d * self.y * v, self.x * v + self.y * u)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.x, -self.y)

    def norm(self) -> int:
        return (self.x * self.x - self.d * self.y * self.y) % self.p

    def conjugate(self) -> "QuadExtElement":
        return self._new(self.x, -self.y)

    def inverse(self) -> "QuadExtElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in F_{p^2}")
        ni = pow(n, -1, self.p)
        return self._new(self.x * ni, -self.y * ni)

    def __truediv__(self, other):
        o = self._pair(other)
        if o is None:
            return NotImplemented
        return self * self._new(*o).inverse()

    def __rtruediv__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(*o) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self._new(1, 0), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._pair(other)
        if o is None:
            return NotImplemented
        return (self.x - o[0]) % self.p == 0 and (self.y - o[1]) % self.p == 0

    def __hash__(self):
        if self.y == 0:
            return hash((self.x, self.p))
        return hash((self.x, self.y, self.p, self.d))

    def __repr__(self):
        return f"{self.x} + {self.y}*delta (mod {self.p}, delta^2={self.d})"

    def __str__(self):
        if self.y == 0:
            return str(self.x)
        return f"({self.x} + {self.y}*delta)"

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def in_base_field(self) -> bool:
        return self.y == 0

    def is_square(self) -> bool:
        return legendre(self.norm(), self.p) >= 0

    def to_pair(self) -> tuple[int, int]:
        return (self.x, self.y)

    def key(self) -> str:
        return f"{self.x}+{self.y}d"


def fp2_frobenius(e: QuadExtElement) -> QuadExtElement:
    """e**p, which is conjugation x + y delta -> x - y delta."""
    if isinstance(e, PrimeFieldElement):
        return e
    return e.conjugate()


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not (3 < self.p < MAX_PRIME) or not is_prime(self.p):
            raise ValueError(f"need a prime 3 < p < 2^31, got {self.p}")

    @property
    def q(self) -> int:
        return self.p

    def __call__(self, value) -> PrimeFieldElement:
        if isinstance(value, PrimeFieldElement):
            return value
        if isinstance(value, QuadExtElement):
            if value.y != 0:
                raise DomainMismatch("element does not lie in F_p")
            return PrimeFieldElement(value.x, self.p)
        return PrimeFieldElement(rational_mod(value, self.p), self.p)

    def elements(self):
        return (PrimeFieldElement(v, self.p) for v in range(self.p))

    def __str__(self):
        return f"F_{self.p}"


@dataclass(frozen=True)
class QuadExtField:
    p: int

    def __post_init__(self):
        if not (3 < self.p < MAX_PRIME) or not is_prime(self.p):
            raise ValueError(f"need a prime 3 < p < 2^31, got {self.p}")

    @property
    def q(self) -> int:
        return self.p * self.p

    @property
    def d(self) -> int:
        return nonresidue(self.p)

    def __call__(self, value) -> QuadExtElement:
        if isinstance(value, QuadExtElement):
            return value
        if isinstance(value, PrimeFieldElement):
            return QuadExtElement(value.value, 0, self.p)
        if isinstance(value, tuple):
            return QuadExtElement(value[0], value[1], self.p)
        return QuadExtElement(rational_mod(value, self.p), 0, self.p)

    def elements(self):
        return (QuadExtElement(x, y, self.p) for x in range(self.p) for y in range(self.p))

    def __str__(self):
        return f"F_{self.p}^2"


def squarefree_part(n: int) -> tuple[int, int]:
    """n = m**2 * D with D squarefree (sign carried by D)."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    m, D, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            m *= f
        if n % f == 0:
            n //= f
            D *= f
        f += 1 if f == 2 else 2
    return m, sign * D * n


@dataclass(frozen=True)
class QuadFieldNumber:
    """x + y*sqrt(D) in Q(sqrt D), D squarefree and not in {0, 1}."""

    x: Fraction
    y: Fraction
    D: int

    def __post_init__(self):
        if self.D in (0, 1) or squarefree_part(self.D)[0] != 1:
            raise ValueError(f"D={self.D} must be squarefree and not 0 or 1")
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def sqrt_of(cls, u) -> "QuadFieldNumber | Fraction":
        """sqrt(u) for rational u, as a rational if u is a square."""
        u = Fraction(u)
        if u == 0:
            return Fraction(0)
        m, D = squarefree_part(u.numerator * u.denominator)
        coeff = Fraction(m, u.denominator)
        if D == 1:
            return coeff
        return cls(Fraction(0), coeff, D)

    def _pair(self, other):
        if isinstance(other, QuadFieldNumber):
            if other.D != self.D:
                raise DomainMismatch("numbers in different quadratic fields")
            return other.x, other.y
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def _new(self, x, y):
        return QuadFieldNumber(x, y, self.D)

    def __add__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(self.x + o[0], self.y + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(self.x - o[0], self.y - o[1])

    def __rsub__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(o[0] - self.x, o[1] - self.y)

    def __mul__(self, other):
        o = self._pair(other)
        if o is None:
            return NotImplemented
        u, v = o
        return self._new(self.x * u + self.D * self.y * v, self.x * v + self.y * u)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.x, -self.y)

    def conjugate(self) -> "QuadFieldNumber":
        return self._new(self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.D * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def inverse(self) -> "QuadFieldNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._new(self.x / n, -self.y / n)

    def __truediv__(self, other):
        o = self._pair(other)
        if o is None:
            return NotImplemented
        return self * self._new(*o).inverse()

    def __rtruediv__(self, other):
        o = self._pair(other)
        return NotImplemented if o is None else self._new(*o) * self.inverse()

    def __eq__(self, other):
        o = self._pair(other)
        if o is None:
            return NotImplemented
        return self.x == o[0] and self.y == o[1]

    def __hash__(self):
        return hash((self.x, self.y, self.D))

    def __repr__(self):
        return f"{self.x} + {self.y}*sqrt({self.D})"


def reduce_quad(b, p: int, conjugate: bool = False):
    """Image of b in F_p (if sqrt D exists mod p) or in F_{p^2}.

    Rationals reduce into F_p.  ``conjugate=True`` picks the other
    embedding sqrt D -> -sqrt D.
    """
    if isinstance(b, (int, Fraction)):
        return PrimeFieldElement(rational_mod(b, p), p)
    if not isinstance(b, QuadFieldNumber):
        raise TypeError(f"cannot reduce {type(b).__name__}")
    if b.D % p == 0:
        raise BadReduction(f"p={p} divides D={b.D}")
    x, y = rational_mod(b.x, p), rational_mod(b.y, p)
    sign = -1 if conjugate else 1
    if legendre(b.D, p) == 1:
        r = sqrt_mod(b.D, p).value
        return PrimeFieldElement(x + sign * y * r, p)
    d = nonresidue(p)
    # sqrt(D) = c*delta with c^2 = D/d
    c = sqrt_mod(b.D * pow(d, -1, p), p).value
    return QuadExtElement(x, sign * y * c, p)


# vectorized kernels ---------------------------------------------------------


@lru_cache(maxsize=64)
def square_table(p: int) -> np.ndarray:
    """chi(n) for n in [0, p) as an int8 array."""
    table = -np.ones(p, dtype=np.int8)
    table[0] = 0
    table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    table.setflags(write=False)
    return table


def chi_array(values: np.ndarray, p: int) -> np.ndarray:
    return square_table(p)[values]


def fp2_norm(ax, ay, p: int, d: int):
    return (ax * ax % p - d * (ay * ay % p)) % p


class Fp2Vec:
    """A numpy array of F_{p^2} elements stored as two int64 component arrays."""

    __slots__ = ("x", "y", "p", "d")

    def __init__(self, x, y, p: int, d: int | None = None):
        self.p = p
        self.d = d if d is not None else nonresidue(p)
        self.x = np.asarray(x, dtype=np.int64) % p
        self.y = np.asarray(y, dtype=np.int64) % p

    @classmethod
    def all_elements(cls, p: int) -> "Fp2Vec":
        u = np.repeat(np.arange(p, dtype=np.int64), p)
        v = np.tile(np.arange(p, dtype=np.int64), p)
        return cls(u, v, p)

    @classmethod
    def prime_field(cls, p: int) -> "Fp2Vec":
        return cls(np.arange(p, dtype=np.int64), np.zeros(p, dtype=np.int64), p)

    def _xy(self, other):
        if isinstance(other, Fp2Vec):
            return other.x, other.y
        if isinstance(other, QuadExtElement):
            if other.d != self.d:
                raise DomainMismatch("different choice of delta")
            return other.x, other.y
        if isinstance(other, PrimeFieldElement):
            return other.value, 0
        if isinstance(other, (int, np.integer)):
            return int(other) % self.p, 0
        if isinstance(other, Fraction):
            return rational_mod(other, self.p), 0
        return None

    def _new(self, x, y):
        return Fp2Vec(x, y, self.p, self.d)

    def __add__(self, other):
        o = self._xy(other)
        return NotImplemented if o is None else self._new(self.x + o[0], self.y + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._xy(other)
        return NotImplemented if o is None else self._new(self.x - o[0], self.y - o[1])

    def __rsub__(self, other):
        o = self._xy(other)
        return NotImplemented if o is None else self._new(o[0] - self.x, o[1] - self.y)

    def __neg__(self):
        return self._new(-self.x, -self.y)

    def __mul__(self, other):
        o = self._xy(other)
        if o is None:
            return NotImplemented
        p = self.p
        u, v = o
        x = (self.x * u % p + self.d * (self.y * v % p)) % p
        y = (self.x * v % p + self.y * u % p) % p
        return self._new(x, y)

    __rmul__ = __mul__

    def norm(self) -> np.ndarray:
        return fp2_norm(self.x, self.y, self.p, self.d)

    def is_zero(self) -> np.ndarray:
        return (self.x == 0) & (self.y == 0)

    def inverse(self) -> "Fp2Vec":
        """Elementwise inverse; zero entries map to zero."""
        ni = inverse_table(self.p)[self.norm()]
        return self._new(self.x * ni, -self.y * ni)

    def __truediv__(self, other):
        if isinstance(other, Fp2Vec):
            return self * other.inverse()
        o = self._xy(other)
        if o is None:
            return NotImplemented
        return self * QuadExtElement(o[0], o[1], self.p, self.d).inverse()

    def __rtruediv__(self, other):
        o = self._xy(other)
        if o is None:
            return NotImplemented
        return self.inverse() * self._new(o[0], o[1])

    def __pow__(self, e: int):
        result = self._new(np.ones_like(self.x), np.zeros_like(self.y))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def equals(self, other) -> np.ndarray:
        o = self._xy(other)
        return (self.x == o[0]) & (self.y == o[1])

    def chi(self) -> np.ndarray:
        """Quadratic character of F_{p^2} (via the norm to F_p)."""
        return square_table(self.p)[self.norm()]

    def __getitem__(self, mask):
        return self._new(self.x[mask], self.y[mask])

    def __len__(self):
        return len(self.x)


@lru_cache(maxsize=16)
def _inv_table(p: int) -> np.ndarray:
    # inv[i] = -(p // i) * inv[p % i]
    inv = np.zeros(p, dtype=np.int64)
    inv[1] = 1
    for i in range(2, p):
        inv[i] = (-(p // i) * int(inv[p % i])) % p
    return inv


def inverse_table(p: int) -> np.ndarray:
    return _inv_table(p)
