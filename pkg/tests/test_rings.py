from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cartier_lab.errors import IllFormedRingMap, NonInvertibleInteger
from cartier_lab.poly import PolynomialRing
from cartier_lab.rings import (
    QQ,
    ZZ,
    IntegersMod,
    RingMap,
    finite_field,
    parse_ring,
    ring_from_json,
    truncated_polynomial_ring,
)

small = st.integers(-50, 50)


@given(small, small, small, st.integers(2, 30))
def test_residue_ring_axioms(a, b, c, m):
    R = IntegersMod(m)
    x, y, z = R(a), R(b), R(c)
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x - x == R.zero
    assert x * R.one == x
    assert R(a * b) == x * y


@given(st.integers(1, 100), st.sampled_from([2, 3, 5, 7, 11]))
def test_inverse_mod_prime(a, p):
    F = IntegersMod(p)
    if a % p:
        assert F(a) * F.inverse(F(a)) == F.one
        assert F.is_unit(F(a))
    else:
        assert not F.is_unit(F(a))


def test_div_int_rejects_non_units():
    assert QQ.div_int(QQ.one, 3) == Fraction(1, 3)
    with pytest.raises(NonInvertibleInteger):
        IntegersMod(6).div_int(IntegersMod(6).one, 3)
    with pytest.raises(NonInvertibleInteger):
        ZZ.div_int(1, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 25])
def test_finite_fields_are_fields(q):
    k = finite_field(q)
    elems = k.elements()
    assert len(elems) == q
    nonzero = [a for a in elems if a]
    assert all(a * k.inverse(a) == k.one for a in nonzero)
    # the multiplicative group has order q - 1
    assert all(a ** (q - 1) == k.one for a in nonzero)


def test_truncated_polynomial_ring_nilpotents():
    A = truncated_polynomial_ring(IntegersMod(3), "eps", 3)
    eps = A.generator
    assert eps ** 2 and not eps ** 3
    assert A.is_nilpotent(eps) and not A.is_nilpotent(A.one + eps)
    assert A.is_unit(A.one + eps)
    assert (A.one + eps) * A.inverse(A.one + eps) == A.one
    assert len(A.elements()) == 27


@pytest.mark.parametrize("spec", ["Z", "Q", "Zmod:12", "GF(4)", "GF(3)[eps]", "GF(2)[eps^4]", "poly:Z:lam",
                                  "poly:Zmod:5:s,t"])
def test_ring_json_round_trip(spec):
    R = parse_ring(spec)
    assert ring_from_json(R.to_json()) == R


@pytest.mark.parametrize("spec", ["Zmod:1", "GF(6)", "nonsense"])
def test_bad_ring_specs(spec):
    with pytest.raises((ValueError, KeyError)):
        parse_ring(spec)


def test_element_formatting_round_trip():
    F7 = IntegersMod(7)
    assert F7.format(F7(10)) == "3 mod 7"
    assert F7.parse("3 mod 7") == F7(3)
    assert QQ.parse(QQ.format(Fraction(-5, 12))) == Fraction(-5, 12)
    R = PolynomialRing(ZZ, ("lam",))
    p = R.parse("2*lam^2 - lam + 1")
    assert R.parse(R.format(p)) == p


def test_canonical_maps():
    assert RingMap.canonical(ZZ, IntegersMod(5))(7) == IntegersMod(5)(2)
    assert RingMap.canonical(QQ, IntegersMod(5))(Fraction(1, 2)) == IntegersMod(5)(3)
    with pytest.raises((IllFormedRingMap, NonInvertibleInteger)):
        RingMap.canonical(QQ, IntegersMod(5))(Fraction(1, 5))
    assert RingMap.canonical(IntegersMod(12), IntegersMod(4))(IntegersMod(12)(7)) == IntegersMod(4)(3)
    with pytest.raises(IllFormedRingMap):
        RingMap.canonical(IntegersMod(12), IntegersMod(5))


def test_specialization_map():
    R = PolynomialRing(ZZ, ("lam",))
    phi = RingMap.specialization(R, IntegersMod(3), {"lam": 2})
    assert phi(R.parse("lam^2 + lam + 1")) == IntegersMod(3)(7)
    with pytest.raises(IllFormedRingMap):
        RingMap.specialization(R, ZZ, {"mu": 1})


@given(st.lists(small, min_size=1, max_size=4), st.lists(small, min_size=1, max_size=4))
def test_polynomial_multiplication_matches_evaluation(a, b):
    R = PolynomialRing(ZZ, ("t",))
    (t,) = R.gens
    f = sum((c * t ** i for i, c in enumerate(a)), R.zero)
    g = sum((c * t ** i for i, c in enumerate(b)), R.zero)
    for x in (-2, 0, 3):
        assert (f * g).evaluate([x]) == f.evaluate([x]) * g.evaluate([x])
