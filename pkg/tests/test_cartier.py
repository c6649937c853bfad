import random
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cartier_lab.acceptance import random_law
from cartier_lab.cartier import (
    DividedPowerCoalgebra,
    DividedPowerHopf,
    cartier_dual,
    comultiplication_preserves_adic,
    dual_pairing_check,
    filtered_dual_weights,
    grouplike_points,
)
from cartier_lab.errors import (
    IndeterminateAtTruncation,
    NonNilpotentAugmentation,
    RingNotFinite,
    WeightInhomogeneity,
)
from cartier_lab.fgl import additive_law, base_change, deform_to_normal_cone, multiplicative_law
from cartier_lab.rings import ZZ, IntegersMod, QuotientRing, RingMap, finite_field, parse_ring


def binomial_basis_product(i, j):
    """Expand C(t,i) C(t,j) in the basis C(t,k) with sympy, by solving at t = 0..i+j."""
    t = sympy.symbols("t")
    target = sympy.expand(sympy.binomial(t, i).expand(func=True) * sympy.binomial(t, j).expand(func=True))
    out = {}
    for k in range(i + j + 1):
        # coefficient of C(t,k) is the k-th forward difference at 0
        val = sum((-1) ** (k - m) * comb(k, m) * target.subs(t, m) for m in range(k + 1))
        if val:
            out[k] = int(val)
    return out


def test_multiplicative_dual_is_binomial_basis():
    H = cartier_dual(multiplicative_law(ZZ, 6))
    for (i, j), row in H.mul.items():
        assert row == binomial_basis_product(i, j)
    assert H.mul[(1, 1)] == {1: 1, 2: 2}


def test_additive_dual_is_divided_powers():
    H = cartier_dual(additive_law(ZZ, 7))
    for (i, j), row in H.mul.items():
        assert row == {i + j: comb(i + j, i)}
    assert H.antipode[3] == {3: -1}


def test_coalgebra_laws():
    assert DividedPowerCoalgebra(ZZ, 6).check() == []


def test_deformed_dual_weights():
    fam = cartier_dual(deform_to_normal_cone(multiplicative_law(ZZ, 5)))
    (lam,) = fam.ring.gens
    assert fam.mul[(1, 1)] == {1: lam, 2: 2}
    report = filtered_dual_weights(fam)
    assert report.checked > 0 and report.witnesses == []
    with pytest.raises(WeightInhomogeneity) as exc:
        filtered_dual_weights(cartier_dual(multiplicative_law(ZZ, 5)))
    assert exc.value.witnesses
    with pytest.raises(WeightInhomogeneity):
        filtered_dual_weights(fam, lam_weight=1)


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_random_dual_pairs_with_its_law(seed):
    G = random_law(random.Random(seed), ZZ, 5)
    H = cartier_dual(G)
    ok, witness = dual_pairing_check(G, H)
    assert ok and witness is None
    assert comultiplication_preserves_adic(G) == list(range(1, 6))
    # the deformation has weight-homogeneous dual constants
    filtered_dual_weights(cartier_dual(deform_to_normal_cone(G)))


def test_perturbed_constant_breaks_pairing():
    G = multiplicative_law(ZZ, 4)
    H = cartier_dual(G)
    mul = {k: dict(v) for k, v in H.mul.items()}
    mul[(1, 2)][3] = mul[(1, 2)].get(3, 0) + 1
    bad = DividedPowerHopf(ZZ, 4, mul, H.antipode)
    ok, witness = dual_pairing_check(G, bad)
    assert not ok and witness == {"identity": "product", "triple": [1, 2, 3]}
    assert bad.axiom_failures()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_dual_commutes_with_base_change(p):
    G = random_law(random.Random(p), ZZ, 5)
    phi = RingMap.canonical(ZZ, IntegersMod(p))
    H = cartier_dual(G)
    Hp = cartier_dual(base_change(G, phi))
    for key, row in H.mul.items():
        assert {k: phi(c) for k, c in row.items() if phi(c)} == {k: c for k, c in Hp.mul[key].items() if c}


def test_hopf_json_round_trip():
    H = cartier_dual(multiplicative_law(finite_field(4), 4))
    again = DividedPowerHopf.from_json(H.to_json())
    assert again.mul == H.mul and again.antipode == H.antipode


def test_grouplikes_of_multiplicative_law():
    A = parse_ring("GF(2)[eps^4]")
    pts = grouplike_points(multiplicative_law(finite_field(2), 8), A)
    # one grouplike per nilpotent parameter, 8 nilpotents in F_2[eps]/eps^4
    assert len(pts) == 8 and pts.law_verified
    for a, seq in zip(pts.parameters, pts.sequences):
        assert all(seq[n] == a ** n for n in range(len(seq)))


def test_grouplikes_of_additive_law():
    pts = grouplike_points(additive_law(finite_field(3), 4), parse_ring("GF(3)[eps]"))
    assert len(pts) == 3 and pts.law_verified


def test_grouplike_errors():
    with pytest.raises(RingNotFinite):
        grouplike_points(multiplicative_law(ZZ, 4), ZZ)
    with pytest.raises(IndeterminateAtTruncation):
        grouplike_points(multiplicative_law(finite_field(2), 2), parse_ring("GF(2)[eps^5]"))
    units = QuotientRing(finite_field(2), "v", (1, 0, 1))
    with pytest.raises(NonNilpotentAugmentation):
        grouplike_points(multiplicative_law(finite_field(2), 4), units)
