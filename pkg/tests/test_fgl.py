import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from cartier_lab.acceptance import honda_law, random_law
from cartier_lab.errors import AxiomViolation, IllFormedRingMap, IndeterminateAtTruncation, NonInvertibleInteger
from cartier_lab.fgl import (
    FormalGroupLaw,
    additive_law,
    base_change,
    check_fgl_axioms,
    deform_to_normal_cone,
    fgl_exp,
    fgl_log,
    formal_inverse,
    height,
    honda_logarithm,
    law_from_coeffs,
    multiplicative_law,
    n_series,
)
from cartier_lab.poly import PolynomialRing
from cartier_lab.rings import QQ, ZZ, IntegersMod, RingMap, finite_field
from cartier_lab.series import PowerSeriesRing, series_compose

seeds = st.integers(0, 10 ** 6)


def test_axiom_violation_names_first_monomial():
    S = PowerSeriesRing(ZZ, ("X", "Y"), 4)
    with pytest.raises(AxiomViolation) as exc:
        check_fgl_axioms(S.parse("X + Y + X^2"))
    assert exc.value.axiom == "commutativity" and exc.value.monomial == "X^2"
    with pytest.raises(AxiomViolation) as exc:
        check_fgl_axioms(S.parse("1 + X + Y"))
    assert exc.value.axiom == "constant-term"
    with pytest.raises(AxiomViolation) as exc:
        check_fgl_axioms(S.parse("X + Y + X^2 + Y^2"))
    assert exc.value.axiom == "unit"
    with pytest.raises(AxiomViolation) as exc:
        check_fgl_axioms(S.parse("X + Y + X^2*Y^2"))
    assert exc.value.axiom == "associativity"


def test_multiplicative_law_invariants():
    G = multiplicative_law(ZZ, 6)
    S = G.univariate()
    # i(X) = 1/(1+X) - 1, [n](X) = (1+X)^n - 1
    assert formal_inverse(G) == S.parse("1 - 1") + S.from_terms({(k,): (-1) ** k for k in range(1, 7)})
    for n in (2, 3, -1, 5):
        x = sympy.symbols("x")
        expected = sympy.series((1 + x) ** n - 1, x, 0, 7).removeO()
        poly = sympy.Poly(expected, x)
        terms = {(m[0],): int(c) for m, c in zip(poly.monoms(), poly.coeffs())}
        assert n_series(G, n).terms == terms


def test_log_of_multiplicative_law_is_log1p():
    G = multiplicative_law(QQ, 7)
    terms = {(k,): Fraction((-1) ** (k + 1), k) for k in range(1, 8)}
    assert fgl_log(G).terms == terms
    assert fgl_exp(fgl_log(G)) == G


def test_log_requires_invertible_integers():
    with pytest.raises(NonInvertibleInteger):
        fgl_log(multiplicative_law(IntegersMod(3), 4))


@given(seeds)
def test_random_law_group_identities(seed):
    rng = random.Random(seed)
    G = random_law(rng, ZZ, 6)
    S = G.univariate()
    (X,) = S.gens
    inv = formal_inverse(G)
    assert G(X, inv) == S.zero
    assert n_series(G, 2) == G(X, X)
    assert n_series(G, 5) == G(n_series(G, 2), n_series(G, 3))
    assert n_series(G, -1) == inv


@given(seeds)
def test_log_exp_round_trip(seed):
    G = random_law(random.Random(seed), ZZ, 6)
    GQ = base_change(G, RingMap.canonical(ZZ, QQ))
    assert fgl_exp(fgl_log(GQ)) == GQ


def test_deformation_family():
    fam = deform_to_normal_cone(multiplicative_law(ZZ, 6))
    (lam,) = fam.ring.gens
    assert fam.coeffs == {(1, 1): lam}
    for value, law in ((1, multiplicative_law(ZZ, 6)), (0, additive_law(ZZ, 6))):
        phi = RingMap.specialization(fam.ring, ZZ, {"lam": value})
        assert base_change(fam, phi) == law


@given(seeds, st.integers(-3, 3))
def test_deformation_specializes_to_rescaling(seed, c):
    """At lam = c the family is c^-1 F(c X, c Y), computed independently by substitution."""
    G = random_law(random.Random(seed), ZZ, 5)
    fam = deform_to_normal_cone(G)
    special = base_change(fam, RingMap.specialization(fam.ring, ZZ, {"lam": c}))
    X, Y = G.series.parent.gens
    scaled = series_compose(G.series, [c * X, c * Y])
    if c:
        assert special.series * c == scaled
    else:
        assert special == additive_law(ZZ, 5)


def test_heights():
    assert height(multiplicative_law(IntegersMod(3), 5)).value == 1
    h = height(additive_law(IntegersMod(3), 5))
    assert h.is_infinite and str(h) == "infinity at truncation N=5"
    assert height(honda_law(2, 2, 8, IntegersMod(2))).value == 2
    assert n_series(honda_law(2, 2, 8, IntegersMod(2)), 2).terms == {(4,): IntegersMod(2).one}
    assert height(honda_law(3, 1, 8, IntegersMod(3))).value == 1
    with pytest.raises(IndeterminateAtTruncation):
        height(multiplicative_law(IntegersMod(5), 4))


def test_honda_law_integrality():
    G = fgl_exp(honda_logarithm(QQ, 2, 2, 8))
    assert G.coefficient(1, 1) == 0
    assert all(c.denominator == 1 for c in G.coeffs.values())


@given(seeds, st.sampled_from([2, 3, 5]))
def test_base_change_commutes_with_inverse(seed, p):
    G = random_law(random.Random(seed), ZZ, 6)
    phi = RingMap.canonical(ZZ, IntegersMod(p))
    Gp = base_change(G, phi)
    assert formal_inverse(Gp) == formal_inverse(G).map_coefficients(phi, IntegersMod(p))


def test_base_change_rejects_wrong_source():
    with pytest.raises(IllFormedRingMap):
        base_change(multiplicative_law(QQ, 4), RingMap.canonical(ZZ, IntegersMod(2)))


def test_json_round_trip():
    G = deform_to_normal_cone(multiplicative_law(finite_field(9), 5))
    assert FormalGroupLaw.from_json(G.to_json()) == G
    H = law_from_coeffs(ZZ, 4, {(1, 1): 3})
    assert FormalGroupLaw.from_json({"N": 4, "coeffs": [[1, 1, "3"]]}) == H
