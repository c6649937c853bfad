from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from cartier_lab.errors import MismatchedContext, NonNilpotentSubstitution, NonUnitLinearTerm
from cartier_lab.rings import QQ, ZZ, IntegersMod
from cartier_lab.series import PowerSeriesRing, TruncatedSeries, series_compose, series_reversion

coeffs = st.lists(st.integers(-4, 4), min_size=1, max_size=6)


def univariate(ring, cs, N, start=0):
    S = PowerSeriesRing(ring, ("x",), N)
    return S.from_terms({(start + i,): c for i, c in enumerate(cs) if c})


def lagrange_reversion(cs, N):
    """Coefficients of the compositional inverse via [x^n] g = (1/n) [x^(n-1)] (x / f)^n."""
    x = sympy.symbols("x")
    f = sum(sympy.Rational(c) * x ** (i + 1) for i, c in enumerate(cs))
    out = {}
    for n in range(1, N + 1):
        h = sympy.series((x / f) ** n, x, 0, n).removeO()
        c = sympy.Poly(sympy.expand(h), x).coeff_monomial(x ** (n - 1)) / n if h != 0 else 0
        if c:
            out[(n,)] = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
    return out


def test_reversion_small_example():
    S = PowerSeriesRing(QQ, ("x",), 2)
    f = S.parse("-x + x^2")
    # f(-x + x^2) = x - x^2 + x^2 = x + O(x^3)
    assert series_reversion(f) == S.parse("-x + x^2")


@given(st.sampled_from([1, -1, 2, 3]), st.lists(st.integers(-3, 3), max_size=5), st.integers(1, 6))
def test_reversion_matches_lagrange_inversion(lead, rest, N):
    cs = [lead] + rest
    f = univariate(QQ, cs, N, start=1)
    g = series_reversion(f)
    assert g.terms == lagrange_reversion(cs, N)
    (x,) = f.parent.gens
    assert series_compose(f, [g]) == x
    assert series_compose(g, [f]) == x


def test_reversion_requires_unit_linear_term():
    S = PowerSeriesRing(ZZ, ("x",), 4)
    with pytest.raises(NonUnitLinearTerm):
        series_reversion(S.parse("2*x + x^2"))
    with pytest.raises(NonUnitLinearTerm):
        series_reversion(S.parse("x^2"))


def test_compose_rejects_nonnilpotent_argument():
    S = PowerSeriesRing(ZZ, ("x",), 3)
    with pytest.raises(NonNilpotentSubstitution):
        series_compose(S.parse("x^2"), [S.parse("1 + x")])


def test_mismatched_contexts():
    a = PowerSeriesRing(ZZ, ("x",), 3).parse("x")
    b = PowerSeriesRing(ZZ, ("x",), 4).parse("x")
    with pytest.raises(MismatchedContext):
        a + b


def test_known_products_and_compositions():
    S = PowerSeriesRing(ZZ, ("x",), 3)
    assert S.parse("(1 + x)*(1 - x)") == S.parse("1 - x^2")
    assert series_compose(S.parse("x^2"), [S.parse("x + x^2")]) == S.parse("x^2 + 2*x^3")
    S2 = PowerSeriesRing(IntegersMod(2), ("x",), 4)
    assert S2.parse("(1 + x + x^2)^2") == S2.parse("1 + x^2 + x^4")


@given(coeffs, coeffs, coeffs)
def test_ring_laws(a, b, c):
    f, g, h = (univariate(ZZ, cs, 5) for cs in (a, b, c))
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@given(coeffs, coeffs, coeffs)
def test_composition_is_associative(a, b, c):
    f = univariate(ZZ, a, 5)
    g = univariate(ZZ, b, 5, start=1)
    h = univariate(ZZ, c, 5, start=1)
    assert series_compose(series_compose(f, [g]), [h]) == series_compose(f, [series_compose(g, [h])])


@given(coeffs)
def test_reciprocal(a):
    f = univariate(QQ, [1] + a, 5)
    assert f * f.reciprocal() == f.parent.one


def test_bivariate_composition_and_truncation():
    S = PowerSeriesRing(ZZ, ("X", "Y"), 3)
    F = S.parse("X + Y + X*Y")
    T = PowerSeriesRing(ZZ, ("u",), 3)
    (u,) = T.gens
    # (1+u)(1+u) - 1
    assert series_compose(F, [u, u]) == T.parse("2*u + u^2")
    assert S.parse("X^2*Y^2").terms == {}


@given(coeffs)
def test_json_round_trip(a):
    f = univariate(IntegersMod(7), a, 5)
    assert TruncatedSeries.from_json(f.to_json()) == f


def test_derivative_and_integral():
    S = PowerSeriesRing(QQ, ("x",), 4)
    f = S.parse("x + 3*x^2 + x^4")
    d = f.derivative("x")
    assert d.N == 3
    assert d.integrate(0, N=4) == f
