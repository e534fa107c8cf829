import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgk3.errors import BadReduction, NonResidue, NotAUnit
from hgk3.finite_field import (
    Fp2Vec,
    PrimeFieldElement,
    QuadExtElement,
    QuadFieldNumber,
    fp2_frobenius,
    has_padic_sqrt,
    inverse_table,
    is_prime,
    legendre,
    nonresidue,
    primes_in,
    rational_mod,
    reduce_quad,
    sqrt_mod,
    square_table,
)

PRIMES = primes_in(5, 100)
prime = st.sampled_from(PRIMES)


def test_legendre_values():
    assert legendre(2, 7) == 1
    assert legendre(-1, 7) == -1
    assert legendre(14, 7) == 0


def test_legendre_against_square_table():
    rng = random.Random(0)
    for _ in range(200):
        p = rng.choice(PRIMES)
        n = rng.randrange(1, p)
        squares = {x * x % p for x in range(1, p)}
        assert legendre(n, p) == (1 if n in squares else -1)


def test_sqrt_mod():
    assert sqrt_mod(2, 7).value == 3
    assert sqrt_mod(0, 11).value == 0
    with pytest.raises(NonResidue):
        sqrt_mod(3, 7)


@given(prime, st.integers(min_value=1, max_value=10**6))
def test_sqrt_squares_back(p, n):
    n %= p
    if legendre(n, p) != 1:
        return
    r = sqrt_mod(n, p).value
    assert r * r % p == n and r <= p - r


def test_padic_sqrt():
    assert has_padic_sqrt(-3, 13)
    assert has_padic_sqrt(1, 101)
    d = nonresidue(13)
    assert not has_padic_sqrt(d, 13)
    with pytest.raises(NotAUnit):
        has_padic_sqrt(13, 13)


def test_frobenius_on_quadratic_extension():
    p = 11
    e = QuadExtElement(3, 0, p)
    assert fp2_frobenius(e) == e
    delta = QuadExtElement.delta(p)
    assert fp2_frobenius(delta) == -delta
    rng = random.Random(1)
    for _ in range(20):
        z = QuadExtElement(rng.randrange(p), rng.randrange(p), p)
        assert fp2_frobenius(fp2_frobenius(z)) == z
        assert fp2_frobenius(z) == z**p


def test_reduce_quad():
    assert reduce_quad(F(3, 2), 7) == PrimeFieldElement(5, 7)
    # b = (1 - sqrt(-3))/2 has 4 b (1 - b) = 4
    b = (1 - QuadFieldNumber.sqrt_of(-3)) * F(1, 2)
    for p in (7, 13, 19):
        e = reduce_quad(b, p)
        assert isinstance(e, PrimeFieldElement)
        assert e * (1 - e) * 4 == 4
    for p in (5, 11):
        e, c = reduce_quad(b, p), reduce_quad(b, p, conjugate=True)
        assert isinstance(e, QuadExtElement)
        assert fp2_frobenius(e) == c
    with pytest.raises(BadReduction):
        reduce_quad(b, 3)
    with pytest.raises(BadReduction):
        rational_mod(F(1, 7), 7)


@given(prime, st.integers(0, 10**4), st.integers(0, 10**4), st.integers(0, 10**4), st.integers(0, 10**4))
def test_quad_ext_field_axioms(p, a, b, c, d):
    x, y = QuadExtElement(a % p, b % p, p), QuadExtElement(c % p, d % p, p)
    assert (x * y).norm() == x.norm() * y.norm() % p
    assert x * y == y * x
    if not y.is_zero():
        assert (x / y) * y == x
    assert x.norm() == (x * x.conjugate()).x


def test_quad_ext_squares():
    p = 7
    squares = {(z * z).key() for z in (QuadExtElement(a, b, p) for a in range(p) for b in range(p))}
    for a in range(p):
        assert PrimeFieldElement(a, p).is_square() == (legendre(a, p) >= 0)
        assert QuadExtElement(a, 0, p).is_square()
        assert QuadExtElement(a, 0, p).key() in squares


def test_vectorized_kernels_match_scalars():
    p = 13
    v = Fp2Vec.all_elements(p)
    assert len(v) == p * p
    w = v * v + 3
    for i in range(0, p * p, 17):
        z = QuadExtElement(int(v.x[i]), int(v.y[i]), p)
        assert QuadExtElement(int(w.x[i]), int(w.y[i]), p) == z * z + 3
    nz = v[~v.is_zero()]
    assert np.all((nz * nz.inverse()).equals(1))
    chi = square_table(p)
    assert [int(c) for c in chi] == [legendre(n, p) for n in range(p)]
    inv = inverse_table(p)
    assert all(n * int(inv[n]) % p == 1 for n in range(1, p))


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
