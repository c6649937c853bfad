"""End-to-end acceptance checks, shared by ``verify-paper`` and the test suite.

Each check returns a :class:`CriterionResult`. The ``detail`` payload is
deterministic for a fixed seed; elapsed time is kept apart so that artifacts
can be compared byte for byte.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from math import comb

from . import __version__
from .cartier import (
    cartier_dual,
    comultiplication_preserves_adic,
    dual_pairing_check,
    filtered_dual_weights,
)
from .errors import CharacteristicTwo
from .fgl import (
    FormalGroupLaw,
    additive_law,
    base_change,
    conjugate,
    deform_to_normal_cone,
    fgl_exp,
    honda_logarithm,
    law_from_coeffs,
    multiplicative_law,
)
from .filtration import (
    AlgebraElement,
    FilteredAlgebra,
    adic_filtration,
    algebra_from_json,
    associated_graded,
    check_adic_unicity,
    fiber,
    ideal_power,
    rees,
    s0_fil_fibers,
)
from .linalg import Subspace
from .poly import PolynomialRing
from .rings import QQ, ZZ, IntegersMod, RingMap, finite_field, truncated_polynomial_ring
from .series import PowerSeriesRing
from .witt import (
    WittContext,
    additive_order,
    fix_points,
    is_subgroup,
    sekiguchi_suwa_kernel,
    verify_ghost_identities,
)

LAW_N = 8


@dataclass
class CriterionResult:
    number: int
    title: str
    verified: bool
    detail: dict
    seconds: float = 0.0
    budget: float | None = None

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds < self.budget

    @property
    def passed(self) -> bool:
        return self.verified and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" (budget {self.budget:g}s)" if self.budget is not None else ""
        return f"[{status}] criterion {self.number:2d}: {self.title} :: {self.seconds:.2f}s{budget}"

    def to_json(self) -> dict:
        return {"number": self.number, "title": self.title, "verified": self.verified, "detail": self.detail}


def _timed(number, title, budget, fn, *args):
    start = time.perf_counter()
    ok, detail = fn(*args)
    return CriterionResult(number, title, bool(ok), detail, time.perf_counter() - start, budget)


def _rng(seed: int, number: int) -> random.Random:
    return random.Random(seed * 1009 + number)


# law corpus ----------------------------------------------------------------

def random_law(rng: random.Random, ring=ZZ, N: int = LAW_N) -> FormalGroupLaw:
    """Additive or multiplicative law transported along a random strict isomorphism over Z, then reduced."""
    base = rng.choice([additive_law, multiplicative_law])(ZZ, N)
    S = PowerSeriesRing(ZZ, ("X",), N)
    phi = S.from_terms({(1,): 1, **{(k,): rng.randint(-3, 3) for k in range(2, N + 1)}})
    G = conjugate(base, phi)
    if ring is not ZZ:
        G = base_change(G, RingMap.canonical(ZZ, ring))
    return G


def honda_law(p: int, h: int, N: int = LAW_N, ring=None) -> FormalGroupLaw:
    """The Honda law of height ``h``; over Q unless ``ring`` is given, in which case it is reduced there."""
    G = fgl_exp(honda_logarithm(QQ, p, h, N))
    if ring is None:
        return G
    coeffs = {}
    for e, c in G.coeffs.items():
        if c.denominator % p == 0:
            raise ValueError("Honda law is not p-integral at this truncation")
        coeffs[e] = ring(c)
    return law_from_coeffs(ring, N, coeffs)


def law_suite(seed: int) -> list:
    """Named laws shared by the duality criteria: standard laws, a family, Honda laws and random laws."""
    rng = _rng(seed, 0)
    F2, F3 = IntegersMod(2), IntegersMod(3)
    laws = [
        ("additive/Z", additive_law(ZZ, LAW_N)),
        ("multiplicative/Z", multiplicative_law(ZZ, LAW_N)),
        ("additive/F2", additive_law(F2, LAW_N)),
        ("multiplicative/F3", multiplicative_law(F3, LAW_N)),
        ("lambda-family/Z[lam]", deform_to_normal_cone(multiplicative_law(ZZ, LAW_N))),
        ("honda(2,2)/F2", honda_law(2, 2, LAW_N, F2)),
        ("honda(3,1)/F3", honda_law(3, 1, LAW_N, F3)),
    ]
    for k in range(10):
        laws.append((f"random-{k}/Z", random_law(rng, ZZ)))
    for k in range(5):
        p = rng.choice([2, 3, 5])
        laws.append((f"random-{k}/F{p}", random_law(rng, IntegersMod(p))))
    return laws


# individual criteria ---------------------------------------------------------

def _specialize(G: FormalGroupLaw, value, target=ZZ) -> FormalGroupLaw:
    phi = RingMap.specialization(G.ring, target, {G.ring.vars[0]: value})
    return base_change(G, phi)


def check_multiplicative_degeneration(seed: int):
    N = LAW_N
    fam = deform_to_normal_cone(multiplicative_law(ZZ, N))
    R = fam.ring
    (lam,) = R.gens
    exact = fam.coeffs == {(1, 1): lam}
    at1 = _specialize(fam, 1) == multiplicative_law(ZZ, N)
    at0 = _specialize(fam, 0) == additive_law(ZZ, N)
    detail = {"family": fam.series.__repr__(), "exact_form": exact, "lam=1 multiplicative": at1,
              "lam=0 additive": at0}
    return exact and at1 and at0, detail


def check_tangent_cone(seed: int):
    rng = _rng(seed, 2)
    rows, ok = [], True
    for k in range(20):
        ring = ZZ if k < 10 else IntegersMod(rng.choice([2, 3, 5, 7]))
        G = random_law(rng, ring)
        fam = deform_to_normal_cone(G)
        special = _specialize(fam, 0, ring)
        good = special == additive_law(ring, LAW_N)
        ok &= good
        rows.append({"ring": str(ring), "law": G.describe(), "nonlinear_terms": len(G.coeffs), "additive_at_0": good})
    return ok, {"cases": rows}


def _random_monomial_algebra(rng):
    field = rng.choice([QQ, finite_field(2), finite_field(3), finite_field(5)])
    r = rng.randint(1, 3)
    while True:
        ds = [rng.randint(2, 5) for _ in range(r)]
        dim = 1
        for d in ds:
            dim *= d
        if dim <= 64:
            break
    names = [f"x{i + 1}" for i in range(r)]
    rels = [f"{n}^{d}" for n, d in zip(names, ds)]
    # an extra monomial relation now and then, keeping the algebra monomial
    if r >= 2 and rng.random() < 0.4:
        i, j = rng.sample(range(r), 2)
        rels.append(f"{names[i]}^{rng.randint(1, ds[i] - 1)}*{names[j]}^{rng.randint(1, ds[j] - 1)}")
    return algebra_from_json({"field": field.to_json(), "gens": names, "rels": rels})


def _perturbed_generators(rng, A, gens):
    """Generators of the same ideal: an invertible mix of ``gens`` plus terms of ``I^2``."""
    I = A.ideal(gens)
    I2 = ideal_power(A, I, 2)
    k = A.field
    m = len(gens)
    while True:
        M = [[k(rng.randint(-2, 2)) for _ in range(m)] for _ in range(m)]
        if Subspace.span(k, m, M).rank == m:
            break
    out = []
    for row in M:
        g = A.zero
        for c, h in zip(row, gens):
            g = g + c * h
        for v in I2.basis:
            c = k(rng.randint(-2, 2))
            if c:
                g = g + c * AlgebraElement(A, v)
        out.append(g)
    return out


def unicity_cases(seed: int, count: int = 100) -> list:
    """Random (algebra, ideal generators, filtration) triples meeting the unicity hypotheses."""
    rng = _rng(seed, 3)
    cases = []
    for _ in range(count):
        A = _random_monomial_algebra(rng)
        gens = list(A.generators)
        if len(gens) > 1 and rng.random() < 0.3:
            gens = rng.sample(gens, rng.randint(1, len(gens) - 1))
        I = A.ideal(gens)
        top = 0
        while not ideal_power(A, I, top + 1).is_zero():
            top += 1
        FA = adic_filtration(A, _perturbed_generators(rng, A, gens), max(top, 1))
        cases.append((A, gens, FA))
    return cases


def _negative_controls(A, gens, top):
    I = A.ideal(gens)
    shifted = FilteredAlgebra(A, {n: ideal_power(A, I, n + 1) for n in range(1, top + 2)}, top, validate=False)
    doubled = FilteredAlgebra(A, {n: ideal_power(A, I, 2 * n) for n in range(1, top + 2)}, top, validate=False)
    return [("F^n = I^(n+1)", shifted, "b"), ("F^n = I^(2n)", doubled, "b")]


def check_adic_unicity_suite(seed: int, cases=None):
    cases = cases if cases is not None else unicity_cases(seed)
    tally = {"certificate": 0, "rejected": 0, "theorem-violation": 0}
    rows = []
    for A, gens, FA in cases:
        r = check_adic_unicity(FA, gens)
        tally[r.status] += 1
        rows.append({"algebra": str(A), "dim": A.dim, "ideal": [A.format(g) for g in gens], "status": r.status})
    controls, controls_ok = [], True
    seen = 0
    for A, gens, FA in cases:
        if FA.N_top < 2 or seen >= 5:
            continue
        seen += 1
        for name, bad, expected in _negative_controls(A, gens, FA.N_top):
            r = check_adic_unicity(bad, gens)
            good = r.status == "rejected" and r.failed_hypothesis == expected
            controls_ok &= good
            controls.append({"algebra": str(A), "control": name, "status": r.status,
                             "failed_hypothesis": r.failed_hypothesis, "expected": expected})
        # the maximal-ideal-adic filtration tested against the ideal of one generator
        if len(A.gens) >= 2:
            m = list(A.generators)
            top = 1
            while not ideal_power(A, A.ideal(m), top + 1).is_zero():
                top += 1
            r = check_adic_unicity(adic_filtration(A, m, top), m[:1])
            good = r.status == "rejected" and r.failed_hypothesis == "a"
            controls_ok &= good
            controls.append({"algebra": str(A), "control": "F^1 outside I", "status": r.status,
                             "failed_hypothesis": r.failed_hypothesis, "expected": "a"})
    ok = tally["certificate"] == len(cases) and tally["theorem-violation"] == 0 and controls_ok and bool(controls)
    return ok, {"tally": tally, "cases": rows, "negative_controls": controls}


def check_rees_fibers(seed: int, cases=None):
    cases = cases if cases is not None else unicity_cases(seed)
    rows, ok = [], True
    for A, gens, FA in cases:
        R = rees(FA)
        f1, f0 = fiber(R, 1), fiber(R, 0)
        gr = associated_graded(FA)
        dims_match = f0.dims == {w: d for w, d in gr.dims.items() if w in f0.dims} and \
            all(gr.dims.get(w, 0) == d for w, d in f0.dims.items())
        good = f1.iso_ok and f0.iso_ok and dims_match and f1.dims["fiber"] == A.dim
        ok &= good
        rows.append({"algebra": str(A), "fiber_1_dim": f1.dims["fiber"], "A_dim": A.dim,
                     "fiber_0_dims": {str(k): v for k, v in f0.dims.items()},
                     "gr_dims": {str(k): v for k, v in gr.dims.items()}, "ok": good})
    return ok, {"cases": rows}


def check_s0_fibers(seed: int):
    rows, ok = [], True
    for k in (QQ, finite_field(3)):
        at1, at0 = s0_fil_fibers(k)
        good = at1.witness["verified"] and at0.witness["verified"] and at1.algebra.dim == 2 == at0.algebra.dim
        ok &= good
        rows.append({"field": str(k), "fiber_1": at1.to_json(), "fiber_0": at0.to_json()})
    try:
        s0_fil_fibers(finite_field(2))
        refused = False
    except CharacteristicTwo:
        refused = True
    ok &= refused
    return ok, {"fields": rows, "F2_refused": refused}


def check_witt_integrality(seed: int):
    rows, ok = [], True
    for p in (2, 3, 5):
        for n in range(1, 5):
            rep = verify_ghost_identities(p, n)
            ok &= rep["ok"]
            rows.append({"p": p, "n": n, "integral": rep["integral"], "sum": all(rep["sum"]),
                         "prod": all(rep["prod"])})
    return ok, {"cases": rows}


def check_fix(seed: int):
    rows, ok = [], True
    for p in (2, 3):
        k = IntegersMod(p)
        for n in range(1, 4):
            ctx = WittContext(p, n, k)
            fix = fix_points(ctx)
            orders = sorted({additive_order(x) for x in fix})
            cyclic = orders[-1] == p ** n
            sub = is_subgroup(fix)
            ss1 = sekiguchi_suwa_kernel(ctx, 1)
            ss0 = sekiguchi_suwa_kernel(ctx, 0)
            good = len(fix) == p ** n and cyclic and sub and ss1 == fix and ss0 == [ctx.zero]
            ok &= good
            rows.append({"p": p, "n": n, "order": len(fix), "max_element_order": orders[-1], "subgroup": sub,
                         "kernel_t1_equals_fix": ss1 == fix, "kernel_t0_trivial": ss0 == [ctx.zero]})
        dual = truncated_polynomial_ring(k, "eps", 2)
        ss0 = sekiguchi_suwa_kernel(WittContext(p, 1, dual), 0)
        good = len(ss0) == p
        ok &= good
        rows.append({"p": p, "n": 1, "ring": str(dual), "kernel_t0_size": len(ss0)})
    return ok, {"cases": rows}


def binomial_product_constants(i: int, j: int) -> dict:
    """``C(y,i) C(y,j) = sum_k d_k C(y,k)`` by forward differences at 0."""
    out = {}
    for k in range(i + j + 1):
        d = sum((-1) ** (k - m) * comb(k, m) * comb(m, i) * comb(m, j) for m in range(k + 1))
        if d:
            out[k] = d
    return out


def check_multiplicative_dual(seed: int):
    H = cartier_dual(multiplicative_law(ZZ, LAW_N))
    mismatches = [[i, j] for (i, j), row in sorted(H.mul.items()) if row != binomial_product_constants(i, j)]
    first = H.mul[(1, 1)] == {1: 1, 2: 2}
    fam = cartier_dual(deform_to_normal_cone(multiplicative_law(ZZ, LAW_N)))
    report = filtered_dual_weights(fam)
    ok = not mismatches and first and not report.witnesses
    return ok, {"N": LAW_N, "x1*x1": {str(k): v for k, v in H.mul[(1, 1)].items()}, "mismatches": mismatches,
                "family_weights": report.to_json()}


def check_additive_dual(seed: int):
    rows, ok = [], True
    for ring in (ZZ, IntegersMod(2), IntegersMod(3)):
        H = cartier_dual(additive_law(ring, LAW_N))
        bad = []
        for (i, j), row in sorted(H.mul.items()):
            want = {i + j: ring(comb(i + j, i))} if ring(comb(i + j, i)) else {}
            if row != want:
                bad.append([i, j])
        ok &= not bad
        rows.append({"ring": str(ring), "mismatches": bad})
    return ok, {"cases": rows}


def check_adic_preservation(seed: int, laws=None):
    laws = laws if laws is not None else law_suite(seed)
    rows = []
    for name, G in laws:
        rows.append({"law": name, "degrees": comultiplication_preserves_adic(G, LAW_N)})
    ok = all(r["degrees"] == list(range(1, LAW_N + 1)) for r in rows)
    return ok, {"laws": rows}


def check_duality_roundtrip(seed: int, laws=None):
    laws = laws if laws is not None else law_suite(seed)
    rows, ok = [], True
    for name, G in laws:
        good, witness = dual_pairing_check(G, cartier_dual(G))
        ok &= good
        rows.append({"law": name, "pairing": good, "witness": witness})
    changes = []
    for name, G in laws:
        if G.ring is ZZ:
            for p in (2, 3, 5):
                phi = RingMap.canonical(ZZ, IntegersMod(p))
                changes.append((f"{name} -> F{p}", G, phi))
        elif isinstance(G.ring, PolynomialRing):
            for v in (0, 1, 2, -1):
                changes.append((f"{name} at lam={v}", G, RingMap.specialization(G.ring, ZZ, {G.ring.vars[0]: v})))
            changes.append((f"{name} at lam=2 in F3", G,
                            RingMap.specialization(G.ring, IntegersMod(3), {G.ring.vars[0]: 2})))
    base_rows = []
    for label, G, phi in changes:
        H = cartier_dual(G)
        H2 = cartier_dual(base_change(G, phi))
        good = all({k: v for k, v in ((k, phi(c)) for k, c in H.mul[key].items()) if v} == H2.mul[key]
                   for key in H.mul)
        ok &= good
        base_rows.append({"change": label, "coefficientwise": good})
    return ok, {"pairing": rows, "base_change": base_rows}


# suite -----------------------------------------------------------------------

TITLES = {
    1: "multiplicative law degenerates to the additive law",
    2: "normal-cone deformation of random laws is additive at 0",
    3: "adic unicity on 100 random filtrations with negative controls",
    4: "Rees fibers recover A and gr",
    5: "fibers of the filtered circle algebra",
    6: "Witt structure polynomials integral with ghost identities",
    7: "Fix and Sekiguchi-Suwa kernels",
    8: "dual of the multiplicative law is integer-valued polynomials",
    9: "dual of the additive law is divided powers",
    10: "comultiplication preserves the adic filtration",
    11: "duality round trip and base change",
    12: "determinism of verify-paper artifacts",
}

BUDGETS = {1: 1.0, 2: 10.0, 3: 30.0, 6: 60.0}


def run_criteria(seed: int = 42, numbers=None) -> list:
    """Criteria 1-11 (criterion 12 compares two whole runs, see :func:`determinism_check`)."""
    numbers = sorted(numbers) if numbers is not None else list(range(1, 12))
    results = []
    cases = laws = None
    generation = 0.0
    if 3 in numbers or 4 in numbers:
        start = time.perf_counter()
        cases = unicity_cases(seed)
        generation = time.perf_counter() - start
    if 10 in numbers or 11 in numbers:
        laws = law_suite(seed)
    table = {
        1: (check_multiplicative_degeneration,),
        2: (check_tangent_cone,),
        3: (check_adic_unicity_suite, cases),
        4: (check_rees_fibers, cases),
        5: (check_s0_fibers,),
        6: (check_witt_integrality,),
        7: (check_fix,),
        8: (check_multiplicative_dual,),
        9: (check_additive_dual,),
        10: (check_adic_preservation, laws),
        11: (check_duality_roundtrip, laws),
    }
    for n in numbers:
        fn, *extra = table[n]
        res = _timed(n, TITLES[n], BUDGETS.get(n), fn, seed, *extra)
        if n == 3:
            # building the random filtrations is part of this criterion's cost
            res.seconds += generation
        results.append(res)
    return results


def artifact_bytes(results: list, seed: int) -> bytes:
    doc = {
        "manifest": manifest(seed=seed, ring="various", p="2,3,5", N=LAW_N),
        "criteria": [r.to_json() for r in results],
    }
    return (json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n").encode()


def manifest(seed=None, ring=None, p=None, N=None) -> dict:
    return {"tool": "cartier-lab", "version": __version__, "ring": ring, "p": p, "N": N, "seed": seed}


def determinism_check(first: bytes, rerun) -> CriterionResult:
    """Compare artifact bytes of a finished run with those of ``rerun()``."""
    start = time.perf_counter()
    second = rerun()
    same = first == second
    detail = {"bytes": len(first), "identical": same}
    if not same:
        a, b = first.decode().splitlines(), second.decode().splitlines()
        diff = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))
        detail["first_difference_line"] = diff + 1
    return CriterionResult(12, TITLES[12], same, detail, time.perf_counter() - start, None)
