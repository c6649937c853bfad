import random

import pytest
from hypothesis import given, settings, strategies as st

from cartier_lab.acceptance import _random_monomial_algebra, unicity_cases
from cartier_lab.errors import (
    CharacteristicTwo,
    FiltrationInvariantError,
    ImproperIdeal,
    NotComplete,
    NotDiscrete,
)
from cartier_lab.filtration import (
    FilteredAlgebra,
    adic_filtration,
    algebra_from_json,
    associated_graded,
    check_adic_unicity,
    constant_filtration,
    fiber,
    ideal_power,
    rees,
    s0_fil_fibers,
    trivial_filtration,
)
from cartier_lab.linalg import QuotientBasis, Subspace
from cartier_lab.rings import QQ, finite_field


def algebra(field, gens, rels):
    return algebra_from_json({"field": field.to_json(), "gens": list(gens), "rels": list(rels)})


def monomial_hilbert(degrees, n):
    """Number of monomials of total degree n in k[x_i]/(x_i^d_i)."""
    counts = {0: 1}
    for d in degrees:
        nxt = {}
        for t, c in counts.items():
            for e in range(d):
                nxt[t + e] = nxt.get(t + e, 0) + c
        counts = nxt
    return counts.get(n, 0)


@pytest.mark.parametrize("degrees", [(3,), (2, 3), (2, 2, 2), (4, 3)])
def test_adic_graded_dims_match_monomial_count(degrees):
    names = [f"x{i}" for i in range(len(degrees))]
    A = algebra(QQ, names, [f"{v}^{d}" for v, d in zip(names, degrees)])
    top = sum(d - 1 for d in degrees)
    FA = adic_filtration(A, names, top)
    gr = associated_graded(FA)
    for n in range(top + 1):
        assert gr.dims.get(n, 0) == monomial_hilbert(degrees, n)
    assert gr.total_dim() == A.dim
    assert gr.generated_in_weight_one()


def test_algebra_arithmetic():
    A = algebra(finite_field(3), ("x", "y"), ("x^2", "y^2"))
    x, y = A.generators
    assert A.dim == 4
    assert not (x * x) and x * y == y * x and bool(x * y)
    u = A.one + x
    assert u * A.inverse(u) == A.one
    assert A.is_nilpotent(x + y) and not A.is_unit(x)


def test_unicity_certificate_and_rejections():
    A = algebra(QQ, ("x",), ("x^4",))
    FA = adic_filtration(A, ["x"], 3)
    res = check_adic_unicity(FA, ["x"])
    assert res.certified and [c["equal"] for c in res.checked] == [True] * len(res.checked)
    # F^1 = (x) is not inside (x^2)
    assert check_adic_unicity(FA, ["x^2"]).failed_hypothesis == "a"
    # F^1 = (x^2) lies in (x) but the graded dimensions differ
    FA2 = adic_filtration(A, ["x^2"], 2)
    res2 = check_adic_unicity(FA2, ["x"])
    assert res2.status == "rejected" and res2.failed_hypothesis == "b"
    # a filtration that skips a weight: dims match at weight 1 only
    weighted = FilteredAlgebra.from_generators(A, {1: ["x^2"], 2: ["x^3"], 3: []}, 2)
    assert check_adic_unicity(weighted, ["x"]).failed_hypothesis == "b"


def test_unicity_preconditions():
    A = algebra(QQ, ("x",), ("x^3",))
    with pytest.raises(NotComplete):
        check_adic_unicity(constant_filtration(A, 2), ["x"])
    with pytest.raises(ImproperIdeal):
        check_adic_unicity(trivial_filtration(A, 1), ["1"])
    with pytest.raises(ImproperIdeal):
        adic_filtration(A, ["1 + x"], 2)
    FA = FilteredAlgebra(A, {1: A.zero_ideal(), 2: A.zero_ideal()}, 1, zeroth=A.ideal(["x"]), validate=False)
    with pytest.raises(NotDiscrete):
        check_adic_unicity(FA, ["x"])


def test_filtration_invariants_are_enforced():
    A = algebra(QQ, ("x",), ("x^4",))
    with pytest.raises(FiltrationInvariantError, match="descending"):
        FilteredAlgebra.from_generators(A, {1: ["x^2"], 2: ["x"], 3: []}, 2)
    with pytest.raises(FiltrationInvariantError, match="multiplicative"):
        FilteredAlgebra.from_generators(A, {1: ["x"], 2: ["x"], 3: []}, 2)


def test_non_nilpotent_ideal_is_not_complete_for_unicity():
    # k[v]/(v^2 - v) splits, so (v) is idempotent and never reaches zero
    A = algebra_from_json({"field": QQ.to_json(), "gens": ["v"], "rels": ["v^2 - v"], "N": None})
    res = check_adic_unicity(trivial_filtration(A, 1), ["v"])
    assert res.failed_hypothesis == "I-complete"


def test_filtration_json_round_trip():
    A = algebra(finite_field(5), ("x", "y"), ("x^2", "y^3"))
    FA = adic_filtration(A, ["x", "y"], 3)
    again = FilteredAlgebra.from_json(FA.to_json())
    assert again.dims() == FA.dims()


def test_rees_fibers_small():
    A = algebra(QQ, ("x", "y"), ("x^2", "y^3"))
    FA = adic_filtration(A, ["x", "y"], 3)
    R = rees(FA)
    one, zero = fiber(R, 1), fiber(R, 0)
    assert one.iso_ok and one.dims["fiber"] == A.dim
    assert zero.iso_ok
    gr = associated_graded(FA)
    assert {w: d for w, d in zero.dims.items() if d} == {w: d for w, d in gr.dims.items() if d}
    with pytest.raises(ValueError):
        fiber(R, 2)


def test_unicity_cases_certified():
    for A, gens, FA in unicity_cases(7, 12):
        assert check_adic_unicity(FA, gens).certified


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_rees_fibers_random(seed):
    rng = random.Random(seed)
    A = _random_monomial_algebra(rng)
    gens = list(A.generators)
    top = 0
    I = A.ideal(gens)
    while not ideal_power(A, I, top + 1).is_zero():
        top += 1
    FA = adic_filtration(A, gens, max(top, 1))
    assert fiber(rees(FA), 1).iso_ok
    assert fiber(rees(FA), 0).iso_ok


def test_s0_fibers():
    for k in (QQ, finite_field(3), finite_field(5)):
        at1, at0 = s0_fil_fibers(k)
        assert at1.witness["verified"] and at0.witness["verified"]
        assert at1.algebra.dim == at0.algebra.dim == 2
    with pytest.raises(CharacteristicTwo):
        s0_fil_fibers(finite_field(2))


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), max_size=6), st.integers(0, 10 ** 6))
def test_quotient_basis_decomposition(rows, seed):
    rng = random.Random(seed)
    sup = Subspace.span(QQ, 4, rows)
    sub = Subspace.span(QQ, 4, [v for v in sup.basis if rng.random() < 0.5])
    qb = QuotientBasis(sub, sup)
    assert qb.rank + sub.rank == sup.rank
    for v in sup.basis:
        c = qb.coords(v)
        rebuilt = [x - sum(ci * r[j] for ci, r in zip(c, qb.reps)) for j, x in enumerate(v)]
        assert sub.contains(rebuilt)
