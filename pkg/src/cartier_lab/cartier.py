"""Hopf algebras on the divided-power basis dual to a formal group law.

The coordinate ring ``R[[x]]`` of a law ``F`` carries the comultiplication
``x -> F(X, Y)``. Its linear dual has the basis ``x^[n]`` (dual to ``x^n``);
the product there is ``x^[i] x^[j] = sum_k c^k_ij x^[k]`` with ``c^k_ij`` the
coefficient of ``X^i Y^j`` in ``F(X, Y)^k``, and the coproduct is the
divided-power one. Everything is kept at truncation ``N``: basis
``x^[0..N]`` and products only for ``i + j <= N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import (
    HopfAxiomFailure,
    IndeterminateAtTruncation,
    NonNilpotentAugmentation,
    PreservationFailure,
    RingNotFinite,
    WeightInhomogeneity,
)
from .fgl import FormalGroupLaw, formal_inverse
from .poly import Poly, PolynomialRing
from .rings import QuotientRing, Ring, ZZ, ring_from_json


# coalgebra -----------------------------------------------------------------

@dataclass(frozen=True)
class DividedPowerCoalgebra:
    """Basis ``x^[0..N]``, ``Delta x^[n] = sum_{i+j=n} x^[i] (x) x^[j]``, weight of ``x^[n]`` is ``-n``."""

    ring: Ring
    N: int

    def coproduct(self, n: int) -> dict:
        return {(i, n - i): self.ring.one for i in range(n + 1)}

    def counit(self, n: int):
        return self.ring.one if n == 0 else self.ring.zero

    @staticmethod
    def weight(n: int) -> int:
        return -n

    def check(self) -> list:
        """Coassociativity, counit and weight laws on every basis element; returns failures."""
        bad = []
        for n in range(self.N + 1):
            # (Delta (x) id) Delta and (id (x) Delta) Delta both give all (a, b, c) with a+b+c = n
            left, right = {}, {}
            for (i, j), c in self.coproduct(n).items():
                for (a, b), d in self.coproduct(i).items():
                    left[(a, b, j)] = left.get((a, b, j), self.ring.zero) + c * d
                for (a, b), d in self.coproduct(j).items():
                    right[(i, a, b)] = right.get((i, a, b), self.ring.zero) + c * d
            if left != right:
                bad.append(("coassociativity", n))
            for side in (0, 1):
                total = self.ring.zero
                for pair, c in self.coproduct(n).items():
                    if pair[side] == 0:
                        total = total + c
                if total != self.ring.one:
                    bad.append(("counit", n))
            if any(self.weight(i) + self.weight(j) != self.weight(n) for i, j in self.coproduct(n)):
                bad.append(("weight", n))
        return bad


# Hopf algebra --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DividedPowerHopf:
    """``mul[(i, j)] = {k: c^k_ij}`` for ``i + j <= N``; ``antipode[k] = {m: s}`` with ``S x^[k] = sum s x^[m]``."""

    ring: Ring
    N: int
    mul: dict
    antipode: dict
    coalgebra: DividedPowerCoalgebra = dc_field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "coalgebra", DividedPowerCoalgebra(self.ring, self.N))

    def constant(self, i: int, j: int, k: int):
        return self.mul[(i, j)].get(k, self.ring.zero)

    def product(self, u: dict, v: dict) -> dict:
        """Product of two elements given as ``{n: coeff}``; pairs with ``i + j > N`` are discarded."""
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                if i + j > self.N:
                    continue
                for k, c in self.mul[(i, j)].items():
                    out[k] = out.get(k, self.ring.zero) + a * b * c
        return {k: c for k, c in out.items() if c}

    def apply_antipode(self, u: dict) -> dict:
        out = {}
        for k, a in u.items():
            for m, s in self.antipode[k].items():
                out[m] = out.get(m, self.ring.zero) + a * s
        return {m: c for m, c in out.items() if c}

    def axiom_failures(self) -> list:
        """Every Hopf axiom at truncation; returns a list of (axiom, witness) pairs."""
        R, N = self.ring, self.N
        zero = R.zero
        bad = [(name, (n,)) for name, n in self.coalgebra.check()]
        basis = [{n: R.one} for n in range(N + 1)]
        for i in range(N + 1):
            if self.product(basis[0], basis[i]) != self.product(basis[i], {0: R.one}) or \
                    self.product(basis[0], basis[i]) != {k: c for k, c in basis[i].items() if c}:
                bad.append(("unit", (i,)))
        for i in range(N + 1):
            for j in range(N + 1 - i):
                if self.mul[(i, j)] != self.mul[(j, i)]:
                    bad.append(("commutativity", (i, j)))
                if self.mul[(i, j)].get(0, zero) != (R.one if i == j == 0 else zero):
                    bad.append(("counit-multiplicative", (i, j)))
                for l in range(N + 1 - i - j):
                    lhs = self.product(self.product(basis[i], basis[j]), basis[l])
                    rhs = self.product(basis[i], self.product(basis[j], basis[l]))
                    if lhs != rhs:
                        bad.append(("associativity", (i, j, l)))
                # Delta(x^[i] x^[j]) against Delta(x^[i]) Delta(x^[j])
                lhs = {}
                for k, c in self.mul[(i, j)].items():
                    for pair in self.coalgebra.coproduct(k):
                        lhs[pair] = lhs.get(pair, zero) + c
                rhs = {}
                for (i1, i2) in self.coalgebra.coproduct(i):
                    for (j1, j2) in self.coalgebra.coproduct(j):
                        for a, ca in self.mul[(i1, j1)].items():
                            for b, cb in self.mul[(i2, j2)].items():
                                rhs[(a, b)] = rhs.get((a, b), zero) + ca * cb
                if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                    bad.append(("bialgebra", (i, j)))
        for n in range(N + 1):
            total = {}
            for (i, j) in self.coalgebra.coproduct(n):
                for k, c in self.product(self.apply_antipode(basis[i]), basis[j]).items():
                    total[k] = total.get(k, zero) + c
            total = {k: c for k, c in total.items() if c}
            expected = {0: R.one} if n == 0 else {}
            if total != expected:
                bad.append(("antipode", (n,)))
            if self.apply_antipode(self.apply_antipode(basis[n])) != basis[n]:
                bad.append(("antipode-involution", (n,)))
        return bad

    def to_json(self) -> dict:
        fmt = self.ring.format
        return {
            "ring": self.ring.to_json(),
            "N": self.N,
            "mul": [[i, j, [[k, fmt(c)] for k, c in sorted(row.items()) if c]]
                    for (i, j), row in sorted(self.mul.items())],
            "antipode": [[k, [[m, fmt(c)] for m, c in sorted(row.items()) if c]]
                         for k, row in sorted(self.antipode.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DividedPowerHopf":
        ring = ring_from_json(obj["ring"]) if "ring" in obj else ZZ
        mul = {(int(i), int(j)): {int(k): ring.parse(str(c)) for k, c in row} for i, j, row in obj["mul"]}
        antipode = {int(k): {int(m): ring.parse(str(c)) for m, c in row} for k, row in obj["antipode"]}
        return cls(ring, int(obj["N"]), mul, antipode)


def _law_powers(G: FormalGroupLaw) -> list:
    F = G.series
    powers = [F.parent.one]
    for _ in range(G.N):
        powers.append(powers[-1] * F)
    return powers


def cartier_dual(G: FormalGroupLaw, validate: bool = True) -> DividedPowerHopf:
    """The dual Hopf algebra of ``G`` on ``x^[0..N]``, all axioms checked before returning."""
    N, R = G.N, G.ring
    powers = _law_powers(G)
    mul = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            row = {}
            for k in range(i + j + 1):
                c = powers[k].coefficient((i, j))
                if c:
                    row[k] = c
            mul[(i, j)] = row
    inv = formal_inverse(G)
    inv_powers = [inv.parent.one]
    for _ in range(N):
        inv_powers.append(inv_powers[-1] * inv)
    # <S x^[k], x^n> = <x^[k], i(x)^n>
    antipode = {k: {n: inv_powers[n].coefficient((k,)) for n in range(N + 1) if inv_powers[n].coefficient((k,))}
                for k in range(N + 1)}
    H = DividedPowerHopf(R, N, mul, antipode)
    if validate:
        bad = H.axiom_failures()
        if bad:
            name, where = bad[0]
            raise HopfAxiomFailure(f"{name} fails at {where}")
    return H


# pairing and filtration checks ----------------------------------------------

def dual_pairing_check(G: FormalGroupLaw, H: DividedPowerHopf):
    """Check the pairing ``<x^[i] x^[j], x^k> = <x^[i] (x) x^[j], F^k>`` and its companions.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness names
    the failing identity and the basis triple.
    """
    if H.N != G.N:
        return False, {"identity": "truncation", "triple": [G.N, H.N, None]}
    N = G.N
    powers = _law_powers(G)
    for i in range(N + 1):
        for j in range(N + 1 - i):
            for k in range(N + 1):
                if H.constant(i, j, k) != powers[k].coefficient((i, j)):
                    return False, {"identity": "product", "triple": [i, j, k]}
    # <Delta x^[n], x^a (x) x^b> = <x^[n], x^(a+b)>
    for n in range(N + 1):
        cop = H.coalgebra.coproduct(n)
        for a in range(N + 1):
            for b in range(N + 1 - a):
                expected = H.ring.one if a + b == n else H.ring.zero
                if cop.get((a, b), H.ring.zero) != expected:
                    return False, {"identity": "coproduct", "triple": [n, a, b]}
    inv = formal_inverse(G)
    p = inv.parent.one
    for n in range(N + 1):
        for k in range(N + 1):
            if H.antipode[k].get(n, H.ring.zero) != p.coefficient((k,)):
                return False, {"identity": "antipode", "triple": [k, n, None]}
        p = p * inv
    return True, None


@dataclass
class WeightReport:
    lam_weight: int
    checked: int
    witnesses: list

    def to_json(self):
        return {"lam_weight": self.lam_weight, "constants_checked": self.checked,
                "homogeneous": not self.witnesses, "witnesses": self.witnesses}


def _lambda_degrees(ring: Ring, c) -> list:
    if isinstance(ring, PolynomialRing) and len(ring.vars) == 1 and isinstance(c, Poly):
        return sorted(e[0] for e, v in c.terms.items() if v)
    return [0]


def filtered_dual_weights(H: DividedPowerHopf, lam_weight: int = -1) -> WeightReport:
    """Check that every term ``c^k_ij x^[k]`` has weight ``-(i + j)``.

    ``x^[n]`` has weight ``-n`` and the family parameter has weight
    ``lam_weight``; over rings without a parameter every nonzero constant
    must have ``k = i + j``.
    """
    witnesses, checked = [], 0
    for (i, j), row in sorted(H.mul.items()):
        for k, c in sorted(row.items()):
            if not c:
                continue
            checked += 1
            for d in _lambda_degrees(H.ring, c):
                if -k + lam_weight * d != -(i + j):
                    witnesses.append({"i": i, "j": j, "k": k, "lam_degree": d,
                                      "weight": -k + lam_weight * d, "expected": -(i + j)})
    report = WeightReport(lam_weight, checked, witnesses)
    if witnesses:
        w = witnesses[0]
        raise WeightInhomogeneity(
            f"x^[{w['i']}]*x^[{w['j']}] has a term of weight {w['weight']} in x^[{w['k']}], expected {w['expected']}",
            witnesses)
    return report


def comultiplication_preserves_adic(G: FormalGroupLaw, N: int | None = None) -> list:
    """Verify ``F(X, Y)^n`` lies in the n-th power of ``(X, Y)`` for ``1 <= n <= N``."""
    N = G.N if N is None else min(N, G.N)
    p = G.series
    verified = []
    for n in range(1, N + 1):
        low = min((sum(e) for e, c in p.terms.items() if c), default=None)
        if low is not None and low < n:
            raise PreservationFailure(f"F^{n} has a term of total degree {low}")
        verified.append(n)
        p = p * G.series
    return verified


# grouplike points --------------------------------------------------------------

@dataclass
class GrouplikePoints:
    """Grouplike elements ``sum a^n x^[n]`` over ``A``, keyed by the parameter ``a``."""

    ring: Ring
    N: int
    parameters: list
    sequences: list
    law_verified: bool
    table: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.parameters)

    def to_json(self):
        fmt = self.ring.format
        return {
            "base": str(self.ring),
            "N": self.N,
            "count": len(self.parameters),
            "points": [fmt(a) for a in self.parameters],
            "group_law_verified": self.law_verified,
            "table": [[fmt(a), fmt(b), fmt(c)] for (a, b), c in sorted(
                ((k, v) for k, v in self.table.items()), key=lambda t: (self.parameters.index(t[0][0]),
                                                                        self.parameters.index(t[0][1])))],
        }


def _augmentation_ideal(A: Ring):
    """Generators of the augmentation ideal and its nilpotency index, or an error."""
    from .filtration import PresentedAlgebra, ideal_power

    if isinstance(A, PresentedAlgebra):
        if A.N is None:
            f0 = A._modulus[0]
            if f0:
                raise NonNilpotentAugmentation(f"{A} has no augmentation v -> 0")
            (v,) = A.generators
            d = 1
            while v ** d:
                d += 1
                if d > A.dim + 1:
                    raise NonNilpotentAugmentation(f"the augmentation ideal of {A} is not nilpotent")
            return d
        I = A.ideal(list(A.generators)) if A.gens else A.zero_ideal()
        r = 1
        while not ideal_power(A, I, r).is_zero():
            r += 1
        return r
    if A.is_field:
        return 1
    if isinstance(A, QuotientRing):
        if A.modulus[0]:
            raise NonNilpotentAugmentation(f"{A} has no augmentation {A.var} -> 0")
        v = A.generator
        d = 1
        while v ** d:
            d += 1
            if d > len(A.modulus):
                raise NonNilpotentAugmentation(f"the augmentation ideal of {A} is not nilpotent")
        if not A.base.is_field:
            raise NonNilpotentAugmentation(f"{A} is not local over a field")
        return d
    raise NonNilpotentAugmentation(f"{A} is not an augmented algebra with nilpotent augmentation ideal")


def _evaluate_law(G: FormalGroupLaw, A: Ring, a, b):
    total = A.zero
    for (i, j), c in G.series.terms.items():
        if c:
            total = total + A(c) * a ** i * b ** j
    return total


def grouplike_points(source, A: Ring) -> GrouplikePoints:
    """Grouplike elements of ``H (x) A`` for the dual ``H`` of a law, ``A`` finite with nilpotent augmentation.

    ``source`` is a law (its dual is built) or a pair ``(G, H)``. The
    conditions ``a_(i+j) = a_i a_j`` (and ``a_i a_j = 0`` when ``i + j > N``)
    are solved by a search on the sequence ``(a_1, ..., a_N)``; the induced
    product on parameters is checked against ``F(a, b)``.
    """
    if isinstance(source, FormalGroupLaw):
        G, H = source, cartier_dual(source)
    else:
        G, H = source
    if not A.is_finite:
        raise RingNotFinite(f"{A} is infinite; grouplikes are found by exhaustive search")
    index = _augmentation_ideal(A)
    N = H.N
    if N + 1 < index:
        raise IndeterminateAtTruncation(
            f"N={N} is below the nilpotency index {index} of the augmentation ideal")
    elems = list(A.elements())
    one, zero = A.one, A.zero

    sequences = []

    def extend(seq):
        n = len(seq)
        if n > N:
            # terms of the coproduct beyond the truncation must vanish
            if all(not (seq[i] * seq[j]) for i in range(1, N + 1) for j in range(N + 1 - i, N + 1)):
                sequences.append(tuple(seq))
            return
        candidates = elems if n == 1 else [seq[1] * seq[n - 1]]
        for a in candidates:
            if all(seq[i] * seq[n - i] == a for i in range(1, n)):
                seq.append(a)
                extend(seq)
                seq.pop()

    extend([one])
    params = [s[1] for s in sequences] if N >= 1 else [zero]
    nil = [a for a in elems if not (a ** index)]
    if len(params) != len(nil) or any(p not in nil for p in params):
        raise IndeterminateAtTruncation("grouplike parameters differ from the nilradical")

    # product in H (x) A: sum_k (sum_ij c^k_ij a^i b^j) x^[k]
    table, ok = {}, True
    for a in params:
        for b in params:
            prod = [zero] * (N + 1)
            for (i, j), row in H.mul.items():
                ab = a ** i * b ** j
                if not ab:
                    continue
                for k, c in row.items():
                    prod[k] = prod[k] + A(c) * ab
            c = _evaluate_law(G, A, a, b)
            expected = [c ** n for n in range(N + 1)]
            if any(x != y for x, y in zip(prod, expected)):
                ok = False
            table[(a, b)] = c
    return GrouplikePoints(A, N, params, sequences, ok, table)
