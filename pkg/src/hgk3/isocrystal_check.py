"""Exact checks of hypergeometric series identities and the connection data.

Series work is over Q with TruncatedSeries; rational functions in s
(Gauss-Manin, the matrix X) use sympy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .elliptic import normal_form
from .errors import BadParameter, IntegrabilityFailure
from .qseries import (
    TruncatedSeries,
    binomial_power,
    cached_hg_series,
    dwork_prime_triple,
    get_triple,
    hg_series,
    s_of_t,
)


@dataclass
class CheckResult:
    ok: bool
    name: str = ""
    first_failure: int | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def _compare(name: str, lhs: TruncatedSeries, rhs: TruncatedSeries, order: int | None = None) -> CheckResult:
    idx = lhs.first_difference(rhs, order)
    return CheckResult(idx is None, name, idx)


# D-module V = D / D P_alpha ------------------------------------------------


@dataclass(frozen=True)
class DModElement:
    """f0*w + f1*Dw + f2*D^2 w with series coordinates."""

    f0: TruncatedSeries
    f1: TruncatedSeries
    f2: TruncatedSeries

    @property
    def coords(self):
        return (self.f0, self.f1, self.f2)

    def __add__(self, other):
        return DModElement(*(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return DModElement(*(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, g: TruncatedSeries) -> "DModElement":
        return DModElement(*(g * a for a in self.coords))

    def agrees_with(self, other: "DModElement", order: int) -> CheckResult:
        for i, (a, b) in enumerate(zip(self.coords, other.coords)):
            idx = a.first_difference(b, order)
            if idx is not None:
                return CheckResult(False, f"coordinate {i}", idx)
        return CheckResult(True)


def d3_coordinates(triple, order: int) -> tuple[TruncatedSeries, ...]:
    """Coordinates of D^3 w: (t/(1-t)) * (sigma3, sigma2, sigma1)."""
    s1, s2, s3 = get_triple(triple).elementary()
    r = TruncatedSeries.variable(order) * binomial_power(-1, order)
    return (r * s3, r * s2, r * s1)


def apply_D(elem: DModElement, triple) -> DModElement:
    f0, f1, f2 = elem.coords
    g0, g1, g2 = d3_coordinates(triple, f0.order)
    return DModElement(f0.theta() + f2 * g0, f1.theta() + f0 + f2 * g1, f2.theta() + f1 + f2 * g2)


@dataclass(frozen=True)
class HattedBasis:
    omega: DModElement
    xi: DModElement
    eta: DModElement
    y: tuple
    G: TruncatedSeries
    G_dual: TruncatedSeries


def g_series(triple, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """G_alpha and G_{dual alpha}."""
    t = get_triple(triple)
    total = sum(t.alpha)
    F = cached_hg_series(t.alpha, (1, 1), order)
    Fd = cached_hg_series(t.dual.alpha, (1, 1), order)
    G = binomial_power(1 - total, order) * Fd / (F * F)
    Gd = binomial_power(total - 2, order) * F / (Fd * Fd)
    return G, Gd


def hatted_basis(triple, order: int) -> HattedBasis:
    t = get_triple(triple)
    s1, s2, _ = t.elementary()
    total = sum(t.alpha)
    F = cached_hg_series(t.alpha, (1, 1), order)
    Fd = cached_hg_series(t.dual.alpha, (1, 1), order)
    zero = TruncatedSeries.zero(order)
    one_minus_t = 1 - TruncatedSeries.variable(order)
    r = TruncatedSeries.variable(order) / one_minus_t

    omega = DModElement(1 / F, zero, zero)
    pre = -(binomial_power(total - 1, order) / Fd)
    xi = DModElement(pre * F.theta(), -(pre * F), zero)
    y2 = one_minus_t * Fd
    y1 = -(r * y2) * s1 - y2.theta()
    y0 = -(r * y2) * s2 - y1.theta()
    eta = DModElement(y0, y1, y2)
    G, Gd = g_series(t, order)
    return HattedBasis(omega, xi, eta, (y0, y1, y2), G, Gd)


def verify_connection(triple, order: int, basis: HattedBasis | None = None) -> CheckResult:
    """D w^ = G xi^, D xi^ = G_dual eta^, D eta^ = 0 up to order - 2."""
    if order < 8:
        raise BadParameter("order must be at least 8")
    hb = basis or hatted_basis(triple, order)
    n = order - 2
    zero = DModElement(*(TruncatedSeries.zero(order),) * 3)
    checks = [
        ("D omega", apply_D(hb.omega, triple), hb.xi.scale(hb.G)),
        ("D xi", apply_D(hb.xi, triple), hb.eta.scale(hb.G_dual)),
        ("D eta", apply_D(hb.eta, triple), zero),
    ]
    for name, lhs, rhs in checks:
        r = lhs.agrees_with(rhs, n)
        if not r:
            return CheckResult(False, f"{name} ({r.name})", r.first_failure)
    return CheckResult(True, "connection")


def with_y1(basis: HattedBasis, y1: TruncatedSeries) -> HattedBasis:
    """A copy of the basis whose eta^ uses a different y1 (for mutation tests)."""
    y0, _, y2 = basis.y
    eta = DModElement(y0, y1, y2)
    return HattedBasis(basis.omega, basis.xi, eta, (y0, y1, y2), basis.G, basis.G_dual)


# Frobenius entries ----------------------------------------------------------


def _integrate_theta(rhs: TruncatedSeries, constant, label: str) -> TruncatedSeries:
    """Solve t E' = rhs with E(0) = constant."""
    if rhs[0] != 0:
        raise IntegrabilityFailure(f"{label}: right-hand side has constant term {rhs[0]}")
    out = [Fraction(constant)] + [rhs[n] / n for n in range(1, rhs.order)]
    return TruncatedSeries(out)


def frobenius_entry_odes(triple, order: int, c=1, e0=0, p: int = 5, e3_0=None):
    """(E1, E2, E3) with t^sigma = c t^p; E3(0) defaults to E1(0) = e0."""
    if order <= p:
        raise BadParameter(f"order {order} must exceed the Frobenius exponent {p}")
    t = get_triple(triple)
    c = Fraction(c)
    e3_0 = e0 if e3_0 is None else e3_0
    G, Gd = g_series(t, order)
    G1, _ = g_series(dwork_prime_triple(t, p), order)
    _, Gd1 = g_series(dwork_prime_triple(t.dual, p), order)
    G1_sigma = G1.substitute_monomial(c, p)
    Gd1_sigma = Gd1.substitute_monomial(c, p)

    E1 = _integrate_theta(G - G1_sigma, e0, "E1")
    E3 = _integrate_theta(Gd - Gd1_sigma, e3_0, "E3")
    E2 = _integrate_theta(Gd * E1 - G1_sigma * E3, 0, "E2")
    return E1, E2, E3


# classical identities -------------------------------------------------------


def clausen_verify(a, b, order: int) -> CheckResult:
    """3F2(2a,2b,a+b; a+b+1/2, 2a+2b) = 2F1(a,b; a+b+1/2)^2."""
    a, b = Fraction(a), Fraction(b)
    half = Fraction(1, 2)
    lhs = hg_series((2 * a, 2 * b, a + b), (a + b + half, 2 * a + 2 * b), order)
    f = hg_series((a, b), (a + b + half,), order)
    return _compare(f"clausen({a}, {b})", lhs, f * f)


def clausen2_verify(triple, order: int) -> CheckResult:
    """3F2(a0,a1,1/2; 1,1; t) = 2F1(a0,a1; 1; s)^2 with s = (1 - sqrt(1-t))/2."""
    t = get_triple(triple)
    a0, a1 = t.elliptic_pair
    if a0 + a1 != 1:
        raise BadParameter("needs alpha0 + alpha1 = 1")
    lhs = hg_series((a0, a1, Fraction(1, 2)), (1, 1), order)
    f = hg_series((a0, a1), (1,), order).compose(s_of_t(order))
    return _compare(f"clausen2({t})", lhs, f * f)


@dataclass
class PfaffResult(CheckResult):
    target: tuple = ()


def pfaff_transform_verify(triple, order: int) -> PfaffResult:
    """3F2 = 2F1(a0/2, a1/2; 1; t)^2 = (1-t)^(-a0) 2F1(a0/2, 1-a1/2; 1; t/(t-1))^2."""
    if order < 8:
        raise BadParameter("order must be at least 8")
    t = get_triple(triple)
    a0, a1 = t.elliptic_pair
    half = Fraction(1, 2)
    target = (a0 / 2, 1 - a1 / 2)
    lhs = hg_series((a0, a1, half), (1, 1), order)
    inner = hg_series((a0 / 2, a1 / 2), (1,), order)
    z = -(TruncatedSeries.variable(order) * binomial_power(-1, order))
    pf = hg_series(target, (1,), order).compose(z)
    rhs = binomial_power(-a0, order) * pf * pf
    for name, x, y in (("clausen stage", lhs, inner * inner), ("pfaff stage", inner * inner, rhs)):
        idx = x.first_difference(y)
        if idx is not None:
            return PfaffResult(False, name, idx, target=target)
    return PfaffResult(True, f"pfaff({t})", target=target)


def chain_rule_verify(f: TruncatedSeries) -> CheckResult:
    """theta_t f at t = 4s(1-s) equals ((1-s)/(1-2s)) theta_s of the composite."""
    n = f.order
    s = TruncatedSeries.variable(n)
    t_of_s = s * 4 - s * s * 4
    lhs = f.theta().compose(t_of_s)
    factor = (1 - s) / (1 - s * 2)
    rhs = factor * f.compose(t_of_s).theta()
    return _compare("chain rule", lhs, rhs)


# Gauss-Manin and X ----------------------------------------------------------

S = sp.Symbol("s")


def _Ds(e):
    return sp.cancel(S * sp.diff(e, S))


@dataclass(frozen=True)
class ConnectionMatrix2:
    """D_s (w, eta) = (w, eta) M; columns are the coordinates of D_s w and D_s eta."""

    matrix: sp.Matrix
    g2: sp.Expr
    g3: sp.Expr
    delta: sp.Expr

    @property
    def f(self):
        return self.matrix[0, 0]

    @property
    def g(self):
        return self.matrix[1, 0]

    @property
    def h(self):
        return self.matrix[0, 1]

    def trace(self) -> sp.Expr:
        return sp.cancel(self.matrix.trace())

    def denominators(self) -> list[sp.Expr]:
        return [sp.fraction(sp.cancel(e))[1] for e in self.matrix]


def gauss_manin(family) -> ConnectionMatrix2:
    nf = normal_form(family)
    g2, g3 = nf.g2, nf.g3
    delta = sp.expand(g2**3 - 27 * g3**2)
    E = sp.expand(2 * g2 * _Ds(g3) - 3 * _Ds(g2) * g3)
    f = sp.cancel(-_Ds(delta) / (12 * delta))
    g = sp.cancel(3 * E / (2 * delta))
    h = sp.cancel(-g2 * E / (8 * delta))
    return ConnectionMatrix2(sp.Matrix([[f, h], [g, -f]]), g2, g3, delta)


def period_ode(family) -> tuple[sp.Expr, sp.Expr, sp.Expr]:
    """Polynomial coefficients (P2, P1, P0) of P2 D^2 + P1 D + P0 killing the period of w."""
    gm = gauss_manin(family)
    f, g, h = gm.f, gm.g, gm.h
    # D^2 w = (Df + f^2 + g h) w + (Dg) eta, eta = (Dw - f w)/g
    q = sp.cancel(_Ds(g) / g)
    c1 = -q
    c0 = sp.cancel(q * f - _Ds(f) - f * f - g * h)
    den = sp.lcm(sp.fraction(c1)[1], sp.fraction(c0)[1])
    return sp.expand(den), sp.expand(sp.cancel(c1 * den)), sp.expand(sp.cancel(c0 * den))


def period_ode_verify(family, order: int = 12) -> CheckResult:
    """The period ODE from gauss_manin annihilates 2F1(a0, a1; 1; s) to the given order."""
    name = normal_form(family).family.triple
    a0, a1 = get_triple(name).elliptic_pair
    P2, P1, P0 = period_ode(name)
    extra = max(sp.Poly(P, S).degree() for P in (P2, P1, P0))
    n = order + extra + 1
    series = hg_series((a0, a1), (1,), n)
    y = sum(sp.Rational(c.numerator, c.denominator) * S**i for i, c in enumerate(series.coeffs))
    Dy = sp.expand(S * sp.diff(y, S))
    D2y = sp.expand(S * sp.diff(Dy, S))
    res = sp.Poly(sp.expand(P2 * D2y + P1 * Dy + P0 * y), S)
    for i in range(order):
        if res.coeff_monomial(S**i) != 0:
            return CheckResult(False, f"period ode {name}", i)
    return CheckResult(True, f"period ode {name}")


def _sym2_D(gm: ConnectionMatrix2, v):
    """D_s on A w^2 + B w eta + C eta^2."""
    f, g, h = gm.f, gm.g, gm.h
    A, B, C = v
    return [
        sp.cancel(_Ds(A) + 2 * f * A + h * B),
        sp.cancel(_Ds(B) + 2 * g * A + 2 * h * C),
        sp.cancel(_Ds(C) + g * B - 2 * f * C),
    ]


def _X_columns(family):
    gm = gauss_manin(family)
    chain = (1 - S) / (1 - 2 * S)
    c0 = [sp.Integer(1), sp.Integer(0), sp.Integer(0)]
    cols = [c0]
    for _ in range(3):
        cols.append([sp.cancel(chain * e) for e in _sym2_D(gm, cols[-1])])
    return cols


def basis_matrix_X(family) -> sp.Matrix:
    """Columns: w_alpha, D_t w_alpha, D_t^2 w_alpha in the basis (w^2, w eta, eta^2)."""
    cols = _X_columns(family)[:3]
    return sp.Matrix(3, 3, lambda i, j: sp.factor(cols[j][i]))


def annihilation_residual(family) -> list[sp.Expr]:
    """(1-t)D^3 - t(sigma1 D^2 + sigma2 D + sigma3) applied to w_E^2, t = 4s(1-s)."""
    fam = normal_form(family).family
    s1, s2, s3 = (sp.Rational(x.numerator, x.denominator) for x in get_triple(fam.triple).elementary())
    c0, c1, c2, c3 = _X_columns(family)
    t = 4 * S * (1 - S)
    return [sp.cancel((1 - t) * c3[i] - t * (s1 * c2[i] + s2 * c1[i] + s3 * c0[i])) for i in range(3)]


REFERENCE_X_HALF = sp.Matrix(
    [
        [1, sp.Rational(-1, 3), (7 * S**2 - 7 * S + 1) / (18 * (2 * S - 1) ** 2)],
        [0, 1 / (2 * S - 1), (-10 * S**2 + 10 * S - 1) / (3 * (2 * S - 1) ** 3)],
        [0, 0, 1 / (2 * (2 * S - 1) ** 2)],
    ]
)


def rational_functions_equal(a: sp.Matrix, b: sp.Matrix) -> CheckResult:
    """Entrywise equality by cross-multiplying numerator/denominator pairs."""
    for i in range(a.rows):
        for j in range(a.cols):
            na, da = sp.fraction(sp.cancel(a[i, j]))
            nb, db = sp.fraction(sp.cancel(b[i, j]))
            if sp.expand(na * db - nb * da) != 0:
                return CheckResult(False, f"entry ({i + 1},{j + 1})", i * a.cols + j)
    return CheckResult(True, "matrix equality")


def verify_xmatrix_half() -> CheckResult:
    return rational_functions_equal(basis_matrix_X("half"), REFERENCE_X_HALF)


__all__ = [
    "CheckResult",
    "ConnectionMatrix2",
    "DModElement",
    "HattedBasis",
    "REFERENCE_X_HALF",
    "PfaffResult",
    "annihilation_residual",
    "apply_D",
    "basis_matrix_X",
    "chain_rule_verify",
    "clausen2_verify",
    "clausen_verify",
    "pfaff_transform_verify",
    "d3_coordinates",
    "frobenius_entry_odes",
    "g_series",
    "gauss_manin",
    "hatted_basis",
    "period_ode",
    "period_ode_verify",
    "rational_functions_equal",
    "verify_connection",
    "verify_xmatrix_half",
    "with_y1",
]
