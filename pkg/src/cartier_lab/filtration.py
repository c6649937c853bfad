"""Filtered and graded commutative algebras at finite truncation.

Algebras are quotients ``k[gens] / (relations)`` over a field ``k``, either

* local: all generators nilpotent, quotient additionally by ``m^(N+1)``
  where ``m`` is the ideal of the generators, so every computation happens
  on the finite monomial basis in degrees <= N; or
* univariate: ``k[v] / (f)`` with ``f`` of unit leading coefficient.

Ideals, products of ideals and quotients are plain linear algebra on the
monomial basis; no Groebner basis is ever formed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .errors import (
    CharacteristicTwo,
    FiltrationInvariantError,
    ImproperIdeal,
    NotComplete,
    NotDiscrete,
    UnsupportedRing,
)
from .fgl import FormalGroupLaw, law_from_coeffs
from .linalg import QuotientBasis, Subspace
from .poly import PolynomialRing, Poly, format_monomial, format_terms, monomial_key
from .rings import Ring, QQ, ring_from_json


# presented algebras ------------------------------------------------------

def _monomials(nvars: int, max_deg: int):
    out = []
    for d in range(max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return out


class AlgebraElement:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: "PresentedAlgebra", coords):
        self.algebra = algebra
        self.coords = tuple(coords)

    def _lift(self, other):
        if isinstance(other, AlgebraElement):
            if other.algebra is not self.algebra and other.algebra != self.algebra:
                raise ValueError("elements of different algebras")
            return other
        try:
            return self.algebra(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.coords])

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return AlgebraElement(self.algebra, self.algebra.mul_vec(self.coords, o.coords))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.algebra.inverse(self) ** (-e)
        result, base = self.algebra.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except ValueError:
            return False
        if o is NotImplemented:
            return NotImplemented
        return all(not (a - b) for a, b in zip(self.coords, o.coords))

    def __hash__(self):
        return hash((id(self.algebra), tuple(hash(c) for c in self.coords)))

    def __bool__(self):
        return any(bool(c) for c in self.coords)

    def __repr__(self):
        return self.algebra.format(self)


class PresentedAlgebra(Ring):
    """A finite-dimensional commutative algebra ``k[gens]/(relations)`` at truncation."""

    kind = "Presented"

    def __init__(self, field: Ring, gens, relations=(), N: int | None = None):
        if not field.is_field:
            raise UnsupportedRing(f"algebras here are over a field, got {field}")
        self.field = field
        self.gens = tuple(gens)
        self.poly_ring = PolynomialRing(field, self.gens)
        self.relations = tuple(r if isinstance(r, Poly) else self.poly_ring.parse(r) for r in relations)
        self.N = N
        self._table = {}
        if N is None:
            self._init_univariate()
        else:
            self._init_local()
        self.index = {e: i for i, e in enumerate(self.basis)}

    # construction ---------------------------------------------------------

    def _init_local(self):
        N, n = self.N, len(self.gens)
        monos = _monomials(n, N)
        rels = [r for r in self.relations if r]
        if all(len(r.terms) == 1 for r in rels):
            dead = [next(iter(r.terms)) for r in rels]
            self._dead = dead
            self._reducer = None
            self.basis = sorted((m for m in monos if not any(all(a >= b for a, b in zip(m, d)) for d in dead)),
                                key=monomial_key)
            return
        self._dead = None
        order = sorted(monos, key=monomial_key, reverse=True)
        self._columns = {m: i for i, m in enumerate(order)}
        self._order = order
        rows = []
        for r in rels:
            for m in monos:
                if sum(m) + min(sum(e) for e in r.terms) > N:
                    continue
                v = [self.field.zero] * len(order)
                for e, c in r.terms.items():
                    t = tuple(a + b for a, b in zip(e, m))
                    if sum(t) <= N:
                        v[self._columns[t]] = v[self._columns[t]] + c
                rows.append(v)
        self._reducer = Subspace.span(self.field, len(order), rows)
        pivots = set(self._reducer.pivots)
        self.basis = sorted((m for m, i in self._columns.items() if i not in pivots), key=monomial_key)

    def _init_univariate(self):
        if len(self.gens) != 1 or len(self.relations) != 1:
            raise ValueError("without a truncation N the algebra must be k[v]/(f) with one relation")
        f = self.relations[0]
        d = f.total_degree()
        if d < 1:
            raise ValueError("the relation must have positive degree")
        lead = f.coefficient((d,))
        inv = self.field.inverse(lead)
        self._modulus = [f.coefficient((i,)) * inv for i in range(d + 1)]
        self.basis = [(i,) for i in range(d)]

    # normal forms ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    def normal_form(self, poly) -> list:
        zero = self.field.zero
        out = [zero] * self.dim
        terms = poly.terms if isinstance(poly, Poly) else poly
        if self.N is None:
            c = [zero] * (max((e[0] for e in terms), default=0) + 1)
            for (k,), v in terms.items():
                c[k] = c[k] + v
            d = len(self._modulus) - 1
            for k in range(len(c) - 1, d - 1, -1):
                lead = c[k]
                if lead:
                    for j in range(d + 1):
                        c[k - d + j] = c[k - d + j] - lead * self._modulus[j]
            for k in range(min(d, len(c))):
                out[k] = c[k]
            return out
        if self._reducer is None:
            for e, v in terms.items():
                i = self.index.get(e)
                if i is not None:
                    out[i] = out[i] + v
            return out
        vec = [zero] * len(self._order)
        for e, v in terms.items():
            j = self._columns.get(e)
            if j is not None:
                vec[j] = vec[j] + v
        vec = self._reducer.reduce(vec)
        for i, m in enumerate(self.basis):
            out[i] = vec[self._columns[m]]
        return out

    def _basis_product(self, i: int, j: int) -> list:
        key = (i, j) if i <= j else (j, i)
        row = self._table.get(key)
        if row is None:
            e = tuple(a + b for a, b in zip(self.basis[i], self.basis[j]))
            nf = self.normal_form({e: self.field.one})
            row = self._table[key] = [(k, c) for k, c in enumerate(nf) if c]
        return row

    def mul_vec(self, u, v) -> list:
        out = [self.field.zero] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in self._basis_product(i, j):
                    out[k] = out[k] + ab * c
        return out

    # Ring interface -------------------------------------------------------

    def __call__(self, value):
        if isinstance(value, AlgebraElement):
            if value.algebra != self:
                raise ValueError("element of another algebra")
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Poly):
            return AlgebraElement(self, self.normal_form(self.poly_ring(value)))
        c = self.field(value)
        return AlgebraElement(self, self.normal_form({(0,) * len(self.gens): c}))

    def parse(self, text):
        from .expr import parse_expression
        return self(parse_expression(text, dict(zip(self.gens, self.generators)), self))

    @property
    def generators(self):
        return tuple(self(g) for g in self.poly_ring.gens)

    def basis_element(self, i: int) -> AlgebraElement:
        return AlgebraElement(self, [self.field.one if j == i else self.field.zero for j in range(self.dim)])

    def monomial(self, e) -> AlgebraElement:
        return AlgebraElement(self, self.normal_form({tuple(e): self.field.one}))

    def __eq__(self, other):
        return (isinstance(other, PresentedAlgebra) and self.field == other.field and self.gens == other.gens
                and self.relations == other.relations and self.N == other.N)

    def __hash__(self):
        return hash((self.field, self.gens, self.relations, self.N))

    @property
    def characteristic(self):
        return self.field.characteristic

    @property
    def is_finite(self):
        return self.field.is_finite

    @property
    def size(self):
        return self.field.size ** self.dim

    @property
    def is_field(self):
        return self.dim == 1

    def elements(self):
        elems = self.field.elements()
        return [AlgebraElement(self, c) for c in itertools.product(elems, repeat=self.dim)]

    def contains(self, a):
        return isinstance(a, AlgebraElement) and a.algebra == self

    def mult_matrix(self, a) -> list:
        """Columns: images of the basis under multiplication by ``a``."""
        a = self(a)
        return [self.mul_vec(a.coords, self.basis_element(i).coords) for i in range(self.dim)]

    def inverse(self, a):
        a = self(a)
        cols = self.mult_matrix(a)
        # solve sum_i b_i col_i = 1 via a quotient basis of the column span
        span = Subspace.span(self.field, self.dim, cols)
        one = self.one.coords
        if span.rank < self.dim:
            raise ZeroDivisionError(f"{self.format(a)} is not a unit")
        zero = self.field.zero
        aug = Subspace.span(self.field, 2 * self.dim,
                            [list(c) + [self.field.one if j == i else zero for j in range(self.dim)]
                             for i, c in enumerate(cols)])
        red = aug.reduce(list(one) + [zero] * self.dim)
        return AlgebraElement(self, [-x for x in red[self.dim:]])

    def is_unit(self, a):
        return Subspace.span(self.field, self.dim, self.mult_matrix(a)).rank == self.dim

    def is_nilpotent(self, a):
        return not (self(a) ** max(self.dim, 1))

    def augmentation(self, a):
        """The residue at the origin (all generators to 0), local algebras only."""
        if self.N is None:
            raise ValueError("augmentation is defined for local algebras")
        a = self(a)
        i = self.index.get((0,) * len(self.gens))
        return a.coords[i] if i is not None else self.field.zero

    def format(self, a):
        a = self(a)
        terms = {self.basis[i]: c for i, c in enumerate(a.coords) if c}
        return format_terms(self.field, self.gens, terms)

    def basis_labels(self) -> list:
        return [format_monomial(self.gens, e) or "1" for e in self.basis]

    def to_json(self):
        return {
            "kind": "Presented",
            "field": self.field.to_json(),
            "gens": list(self.gens),
            "rels": [self.poly_ring.format(r) for r in self.relations],
            "N": self.N,
        }

    def random_element(self, rng, size=5):
        return AlgebraElement(self, [self.field.random_element(rng, size) for _ in range(self.dim)])

    def __str__(self):
        rels = ", ".join(self.poly_ring.format(r) for r in self.relations)
        trunc = "" if self.N is None else f", deg>{self.N}"
        return f"{self.field}[{','.join(self.gens)}]/({rels}{trunc})"

    # ideals ---------------------------------------------------------------

    def _vec(self, g) -> list:
        if isinstance(g, (list, tuple)):
            return list(g)
        return list(self(g).coords)

    def ideal(self, generators) -> Subspace:
        gens = [self._vec(g) for g in generators]
        vecs = [self.mul_vec(self.basis_element(i).coords, g) for g in gens for i in range(self.dim)]
        return Subspace.span(self.field, self.dim, vecs)

    def whole(self) -> Subspace:
        return Subspace.whole(self.field, self.dim)

    def zero_ideal(self) -> Subspace:
        return Subspace(self.field, self.dim)

    def _times_generators(self, S: Subspace) -> list:
        gens = [g.coords for g in self.generators]
        return [self.mul_vec(g, v) for g in gens for v in S.basis]

    def minimal_generators(self, S: Subspace) -> list:
        """Ideal generators of ``S``; for local algebras a basis of ``S / mS`` (Nakayama)."""
        if self.N is None:
            return S.basis
        return QuotientBasis(Subspace.span(self.field, self.dim, self._times_generators(S)), S).reps

    def ideal_product(self, I: Subspace, J: Subspace, J_generators=None) -> Subspace:
        """``IJ`` for ideals ``I, J``: the span of ``u h`` with ``u`` in a basis of I, ``h`` generating J."""
        gens = J_generators if J_generators is not None else self.minimal_generators(J)
        return Subspace.span(self.field, self.dim, [self.mul_vec(u, h) for h in gens for u in I.basis])

    def is_ideal(self, S: Subspace) -> bool:
        # closure under the algebra generators is enough
        return all(S.contains(v) for v in self._times_generators(S))

    def ideal_generators_text(self, S: Subspace) -> list:
        return [self.format(AlgebraElement(self, v)) for v in S.basis]


def algebra_from_json(obj: dict) -> PresentedAlgebra:
    field = ring_from_json(obj["field"]) if "field" in obj else QQ
    gens = obj["gens"]
    rels = obj.get("rels", [])
    N = obj.get("N")
    if N is None and "N" not in obj:
        N = _default_truncation(field, gens, rels)
    return PresentedAlgebra(field, gens, rels, N)


def _default_truncation(field, gens, rels):
    """Largest surviving degree when the relations contain a pure power of every generator."""
    R = PolynomialRing(field, tuple(gens))
    bounds = {}
    for r in rels:
        P = R.parse(r) if isinstance(r, str) else r
        if len(P.terms) == 1:
            (e,) = P.terms
            nz = [i for i, k in enumerate(e) if k]
            if len(nz) == 1:
                i = nz[0]
                bounds[i] = min(bounds.get(i, e[i]), e[i])
    if len(bounds) != len(gens):
        raise ValueError("give N: the relations do not make every generator nilpotent")
    return sum(b - 1 for b in bounds.values())


# filtered algebras ---------------------------------------------------------

class FilteredAlgebra:
    """A descending multiplicative chain of ideals F^n of a presented algebra.

    ``F^n = A`` for ``n <= 0``; ideals are stored for ``1 <= n <= N_top + 1``
    and the chain is constant from ``N_top + 1`` on. Completeness at
    truncation means that the constant tail ``F^(N_top+1)`` is zero.
    """

    def __init__(self, algebra: PresentedAlgebra, ideals: dict, N_top: int,
                 zeroth: Subspace | None = None, validate: bool = True):
        self.algebra = algebra
        self.N_top = N_top
        self.ideals = {}
        for n in range(1, N_top + 2):
            if n in ideals:
                I = ideals[n]
            elif n == N_top + 1:
                I = self.ideals[N_top] if N_top >= 1 else algebra.whole()
            else:
                raise ValueError(f"chain is missing F^{n}")
            self.ideals[n] = I if isinstance(I, Subspace) else algebra.ideal(I)
        self.zeroth = zeroth if zeroth is not None else algebra.whole()
        if validate:
            problem = self.invariant_violation()
            if problem:
                raise FiltrationInvariantError(problem)

    @classmethod
    def from_generators(cls, algebra, chain: dict, N_top: int, validate: bool = True):
        ideals = {int(n): algebra.ideal(g) for n, g in chain.items() if int(n) >= 1}
        zeroth = algebra.ideal(chain[0]) if 0 in chain else None
        return cls(algebra, ideals, N_top, zeroth=zeroth, validate=validate)

    def F(self, n: int) -> Subspace:
        if n <= 0:
            return self.zeroth if n == 0 else self.algebra.whole()
        return self.ideals[min(n, self.N_top + 1)]

    @property
    def top(self) -> Subspace:
        return self.ideals[self.N_top + 1]

    def invariant_violation(self) -> str | None:
        A = self.algebra
        if self.zeroth != A.whole():
            return "not exhaustive: F^0 differs from A"
        for n, I in self.ideals.items():
            if not A.is_ideal(I):
                return f"F^{n} is not an ideal"
        for n in range(0, self.N_top + 1):
            if not self.F(n).contains_space(self.F(n + 1)):
                return f"not descending: F^{n + 1} is not contained in F^{n}"
        top = self.N_top + 1
        for a in range(1, top + 1):
            for b in range(a, top + 1):
                if not self.F(a + b).contains_space(A.ideal_product(self.F(a), self.F(b))):
                    return f"not multiplicative: F^{a} F^{b} is not contained in F^{a + b}"
        return None

    def dims(self) -> dict:
        return {n: self.F(n).rank for n in range(0, self.N_top + 2)}

    def to_json(self) -> dict:
        A = self.algebra
        chain = {str(n): A.ideal_generators_text(I) for n, I in self.ideals.items()}
        return {"algebra": A.to_json(), "chain": chain, "N_top": self.N_top}

    @classmethod
    def from_json(cls, obj: dict, validate: bool = True) -> "FilteredAlgebra":
        A = algebra_from_json(obj["algebra"])
        chain = {int(k): [A.parse(g) for g in v] for k, v in obj["chain"].items()}
        N_top = int(obj.get("N_top", max(chain) if chain else 0))
        return cls.from_generators(A, chain, N_top, validate=validate)


def ideal_power(A: PresentedAlgebra, I: Subspace, n: int) -> Subspace:
    if n <= 0:
        return A.whole()
    out, gens = I, A.minimal_generators(I)
    for _ in range(n - 1):
        out = A.ideal_product(out, I, gens)
    return out


def adic_filtration(A: PresentedAlgebra, ideal, N_top: int) -> FilteredAlgebra:
    """``F^n = I^n`` for ``1 <= n <= N_top + 1``."""
    I = ideal if isinstance(ideal, Subspace) else A.ideal(ideal)
    if I == A.whole():
        raise ImproperIdeal("the ideal is the whole algebra")
    ideals, cur, gens = {}, I, A.minimal_generators(I)
    for n in range(1, N_top + 2):
        ideals[n] = cur
        cur = A.ideal_product(cur, I, gens)
    return FilteredAlgebra(A, ideals, N_top, validate=False)


def trivial_filtration(A: PresentedAlgebra, N_top: int = 0) -> FilteredAlgebra:
    """``F^n = 0`` for every ``n >= 1``."""
    return FilteredAlgebra(A, {n: A.zero_ideal() for n in range(1, N_top + 2)}, N_top, validate=False)


def constant_filtration(A: PresentedAlgebra, N_top: int = 1) -> FilteredAlgebra:
    return FilteredAlgebra(A, {n: A.whole() for n in range(1, N_top + 2)}, N_top, validate=False)


def is_complete(FA: FilteredAlgebra) -> bool:
    return FA.top.is_zero()


# graded algebras -----------------------------------------------------------

@dataclass
class GradedAlgebra:
    """Weight-indexed finite pieces with a bilinear multiplication table.

    ``table[(a, i, b, j)]`` holds the weight ``a + b`` coordinates of the
    product of basis element ``i`` of weight ``a`` with element ``j`` of
    weight ``b``.
    """

    field: Ring
    labels: dict
    table: dict = dc_field(default_factory=dict)

    @property
    def dims(self) -> dict:
        return {w: len(b) for w, b in sorted(self.labels.items())}

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def multiply(self, a: int, u, b: int, v) -> list:
        out = [self.field.zero] * len(self.labels.get(a + b, []))
        for i, x in enumerate(u):
            if not x:
                continue
            for j, y in enumerate(v):
                if not y:
                    continue
                for k, c in enumerate(self.table.get((a, i, b, j), ())):
                    if c:
                        out[k] = out[k] + x * y * c
        return out

    def generated_in_weight_one(self, from_weight: int = 2) -> dict:
        """Per weight n >= 2: does gr^1 . gr^(n-1) span gr^n?"""
        out = {}
        for n, d in self.dims.items():
            if n < from_weight or d == 0:
                continue
            vecs = [self.table.get((1, i, n - 1, j), [self.field.zero] * d)
                    for i in range(len(self.labels.get(1, []))) for j in range(len(self.labels.get(n - 1, [])))]
            out[n] = Subspace.span(self.field, d, vecs).rank == d
        return out

    def to_json(self) -> dict:
        f = self.field
        return {
            "dims": {str(w): d for w, d in self.dims.items()},
            "basis": {str(w): list(b) for w, b in sorted(self.labels.items())},
            "mul": [[a, i, b, j, [f.format(c) for c in v]] for (a, i, b, j), v in sorted(self.table.items())
                    if any(v)],
        }


def _graded_from_pieces(A: PresentedAlgebra, pieces: dict) -> GradedAlgebra:
    """``pieces[w] = (QuotientBasis of F^(w+1) in F^w)``."""
    labels = {w: [A.format(AlgebraElement(A, r)) for r in q.reps] for w, q in pieces.items()}
    table = {}
    for a, qa in pieces.items():
        for b, qb in pieces.items():
            if b < a:
                continue
            target = pieces.get(a + b)
            for i, u in enumerate(qa.reps):
                for j, v in enumerate(qb.reps):
                    prod = A.mul_vec(u, v)
                    if target is None:
                        coords = []
                        if any(prod) and a + b <= max(pieces):
                            raise FiltrationInvariantError("product leaves the filtration")
                    else:
                        coords = target.coords(prod)
                    table[(a, i, b, j)] = coords
                    table[(b, j, a, i)] = coords
    return GradedAlgebra(A.field, labels, table)


def associated_graded(FA: FilteredAlgebra) -> GradedAlgebra:
    """``gr^n = F^n / F^(n+1)`` for ``0 <= n <= N_top``, with the induced product."""
    A = FA.algebra
    pieces = {n: QuotientBasis(FA.F(n + 1), FA.F(n)) for n in range(0, FA.N_top + 1)}
    pieces = {n: q for n, q in pieces.items() if q.rank or n == 0}
    return _graded_from_pieces(A, pieces)


# unicity -------------------------------------------------------------------

@dataclass
class UnicityResult:
    """Outcome of :func:`check_adic_unicity`.

    ``status`` is ``"certificate"``, ``"rejected"`` (a hypothesis failed, named
    in ``failed_hypothesis``) or ``"theorem-violation"``.
    """

    status: str
    N_top: int
    failed_hypothesis: str | None = None
    detail: str = ""
    checked: list = dc_field(default_factory=list)
    gr_dims: dict = dc_field(default_factory=dict)
    adic_gr_dims: dict = dc_field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == "certificate"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "N_top": self.N_top,
            "failed_hypothesis": self.failed_hypothesis,
            "detail": self.detail,
            "checked_equalities": self.checked,
            "gr_dims": {str(k): v for k, v in self.gr_dims.items()},
            "adic_gr_dims": {str(k): v for k, v in self.adic_gr_dims.items()},
        }


def check_adic_unicity(FA: FilteredAlgebra, ideal) -> UnicityResult:
    """Test a complete filtration against the hypotheses that force it to be I-adic.

    Hypotheses: (a) ``F^1`` is contained in ``I``; (b) in every weight
    ``n >= 1`` the associated graded has the dimension of ``I^n / I^(n+1)``
    and is spanned by products from weight 1. When both hold, ``F^n = I^n``
    is verified for every stored ``n``.
    """
    A = FA.algebra
    if FA.zeroth != A.whole():
        raise NotDiscrete("F^0 is not the whole algebra")
    if not is_complete(FA):
        raise NotComplete(f"F^{FA.N_top + 1} is nonzero")
    I = ideal if isinstance(ideal, Subspace) else A.ideal(ideal)
    if I == A.whole():
        raise ImproperIdeal("the ideal is the whole algebra")

    powers = [A.whole(), I]
    I_gens = A.minimal_generators(I)
    while not powers[-1].is_zero():
        nxt = A.ideal_product(powers[-1], I, I_gens)
        if nxt == powers[-1]:
            return UnicityResult("rejected", FA.N_top, "I-complete",
                                 f"I^{len(powers) - 1} = I^{len(powers)} is nonzero: A is not I-adically complete")
        powers.append(nxt)

    def I_pow(n):
        return powers[n] if n < len(powers) else powers[-1]

    top = max(FA.N_top + 1, len(powers))
    gr_dims = {n: FA.F(n).rank - FA.F(n + 1).rank for n in range(1, top + 1)}
    adic_dims = {n: I_pow(n).rank - I_pow(n + 1).rank for n in range(1, top + 1)}
    result = UnicityResult("rejected", FA.N_top, gr_dims=gr_dims, adic_gr_dims=adic_dims)

    if not I.contains_space(FA.F(1)):
        result.failed_hypothesis = "a"
        result.detail = "F^1 is not contained in I"
        return result

    for n in range(1, top + 1):
        if gr_dims[n] != adic_dims[n]:
            result.failed_hypothesis = "b"
            result.detail = f"weight {n}: dim gr = {gr_dims[n]}, dim I^{n}/I^{n + 1} = {adic_dims[n]}"
            return result
    F1_gens = A.minimal_generators(FA.F(1))
    for n in range(2, top + 1):
        # gr^n spanned by gr^1 . gr^(n-1)  <=>  F^n = F^1 F^(n-1) + F^(n+1)
        spanned = A.ideal_product(FA.F(n - 1), FA.F(1), F1_gens) + FA.F(n + 1)
        if spanned != FA.F(n):
            result.failed_hypothesis = "b"
            result.detail = f"weight {n} is not generated by weight 1"
            return result

    for n in range(1, top + 1):
        ok = FA.F(n) == I_pow(n)
        result.checked.append({"n": n, "dim": FA.F(n).rank, "equal": ok})
        if not ok:
            result.status = "theorem-violation"
            result.detail = f"hypotheses hold but F^{n} differs from I^{n}"
            return result
    result.status = "certificate"
    return result


# Rees construction ---------------------------------------------------------

class ReesAlgebra:
    """``sum_n F^n t^(-n)`` inside ``A[t, t^-1]``, t of weight -1.

    Weights below 0 are the t-multiples ``t^k A`` and are not stored; the
    pieces ``R_n = F^n`` for ``0 <= n <= N_top`` generate over ``k[t]``.
    Elements of the stored part are concatenated coordinates, piece by piece,
    each piece in the echelon basis of ``F^n``.
    """

    def __init__(self, FA: FilteredAlgebra):
        if not is_complete(FA):
            raise NotComplete("the Rees fibers are computed for complete filtrations")
        self.base = FA
        self.algebra = FA.algebra
        self.weights = list(range(0, FA.N_top + 1))
        self.pieces = {n: FA.F(n).basis for n in self.weights}
        self._sparse = {n: [[(j, x) for j, x in enumerate(r) if x] for r in rows] for n, rows in self.pieces.items()}
        self.offsets, off = {}, 0
        for n in self.weights:
            self.offsets[n] = off
            off += len(self.pieces[n])
        self.size = off
        self._tagged = {}

    def dims(self) -> dict:
        return {n: len(self.pieces[n]) for n in self.weights}

    def embed(self, n: int, coords_in_piece) -> list:
        v = [self.algebra.field.zero] * self.size
        for k, c in enumerate(coords_in_piece):
            v[self.offsets[n] + k] = c
        return v

    def piece_coords(self, n: int, a_vec) -> list:
        """Coordinates of an element of ``F^n`` (given in A) in the piece basis."""
        rows = self.pieces[n]
        S = self._tagged.get(n)
        if S is None:
            S = self._tagged[n] = Subspace.span(
                self.algebra.field, self.algebra.dim + len(rows),
                [list(r) + [self.algebra.field.one if j == k else self.algebra.field.zero
                            for j in range(len(rows))] for k, r in enumerate(rows)])
        red = S.reduce(list(a_vec) + [self.algebra.field.zero] * len(rows))
        if any(red[: self.algebra.dim]):
            raise ValueError(f"element is not in F^{n}")
        return [-x for x in red[self.algebra.dim:]]

    def element(self, n: int, a_vec) -> list:
        """The stored vector for ``a t^(-n)``, ``a`` in ``F^n``."""
        return self.embed(n, self.piece_coords(n, a_vec))

    def to_A(self, n: int, coords_in_piece) -> list:
        out = [self.algebra.field.zero] * self.algebra.dim
        for c, row in zip(coords_in_piece, self._sparse[n]):
            if c:
                for j, x in row:
                    out[j] = out[j] + c * x
        return out

    def t_times(self, n: int, coords_in_piece) -> list:
        """``t . (a t^(-n)) = a t^(-(n-1))``: the inclusion of F^n into F^(n-1)."""
        return self.element(n - 1, self.to_A(n, coords_in_piece))

    def multiply(self, m: int, u, n: int, v):
        """Product of ``a t^-m`` and ``b t^-n``; returns (weight, piece coordinates) or None if zero."""
        prod = self.algebra.mul_vec(self.to_A(m, u), self.to_A(n, v))
        w = m + n
        if w > self.base.N_top:
            if any(prod):
                raise FiltrationInvariantError("product outside the stored Rees pieces")
            return None
        return w, self.piece_coords(w, prod)

    def to_json(self) -> dict:
        A = self.algebra
        return {
            "N_top": self.base.N_top,
            "t_weight": -1,
            "pieces": {str(n): [A.format(AlgebraElement(A, r)) + (f"*u^{n}" if n else "") for r in self.pieces[n]]
                       for n in self.weights},
            "dims": {str(n): d for n, d in self.dims().items()},
        }


def rees(FA: FilteredAlgebra) -> ReesAlgebra:
    return ReesAlgebra(FA)


@dataclass
class FiberResult:
    at: int
    dims: dict
    iso_ok: bool
    witness: list
    algebra: object = None

    def to_json(self) -> dict:
        return {"at": self.at, "dims": {str(k): v for k, v in self.dims.items()},
                "isomorphism_verified": self.iso_ok, "basis_map": self.witness}


def fiber(R: ReesAlgebra, at: int) -> FiberResult:
    """The fiber of the Rees family at ``t = 1`` (recovers A) or ``t = 0`` (recovers gr)."""
    if at == 1:
        return _fiber_one(R)
    if at == 0:
        return _fiber_zero(R)
    raise ValueError("fibers are taken at t = 0 or t = 1")


def _fiber_one(R: ReesAlgebra) -> FiberResult:
    A, field = R.algebra, R.algebra.field
    rel = []
    for n in R.weights[1:]:
        for k in range(len(R.pieces[n])):
            e = [field.one if j == k else field.zero for j in range(len(R.pieces[n]))]
            v = R.embed(n, e)
            tv = R.t_times(n, e)
            rel.append([x - y for x, y in zip(v, tv)])
    K = Subspace.span(field, R.size, rel)
    Q = QuotientBasis(K, Subspace.whole(field, R.size))

    def collapse(vec):
        # the map sum a_n t^-n -> sum a_n, which kills t - 1
        out = [field.zero] * A.dim
        for n in R.weights:
            for c, row in zip(vec[R.offsets[n]: R.offsets[n] + len(R.pieces[n])], R._sparse[n]):
                if c:
                    for j, x in row:
                        out[j] = out[j] + c * x
        return out

    images = [collapse(r) for r in Q.reps]
    bijective = Q.rank == A.dim and Subspace.span(field, A.dim, images).rank == A.dim
    ok = bijective and all(not any(collapse(v)) for v in K.basis)
    # multiplicativity: the weight-0 classes of 1 and the generators of A generate the
    # fiber (every v t^-n is congruent to v), so it is enough to test them against a
    # spanning set; including K also checks that K is an ideal
    if ok:
        gens = [R.element(0, A.one.coords)] + [R.element(0, g.coords) for g in A.generators]
        for g in gens:
            for v in Q.reps + K.basis:
                if collapse(_rees_product(R, g, v)) != A.mul_vec(collapse(g), collapse(v)):
                    ok = False
    witness = [{"class": i, "image": A.format(AlgebraElement(A, img))} for i, img in enumerate(images)]
    return FiberResult(1, {"fiber": Q.rank, "A": A.dim}, ok, witness, algebra=A)


def _rees_product(R: ReesAlgebra, u, v) -> list:
    field = R.algebra.field
    out = [field.zero] * R.size
    for m in R.weights:
        su = u[R.offsets[m]: R.offsets[m] + len(R.pieces[m])]
        if not any(su):
            continue
        for n in R.weights:
            sv = v[R.offsets[n]: R.offsets[n] + len(R.pieces[n])]
            if not any(sv):
                continue
            res = R.multiply(m, su, n, sv)
            if res is not None:
                w, coords = res
                off = R.offsets[w]
                for k, c in enumerate(coords):
                    if c:
                        out[off + k] = out[off + k] + c
    return out


def _fiber_zero(R: ReesAlgebra) -> FiberResult:
    A, field = R.algebra, R.algebra.field
    gr = associated_graded(R.base)
    witness, ok, dims = [], True, {}
    quotients = {}
    for n in R.weights:
        d = len(R.pieces[n])
        # t R_(n+1) inside R_n, both in piece coordinates
        if n + 1 in R.pieces:
            t_image = [R.piece_coords(n, R.to_A(n + 1, [field.one if j == k else field.zero
                                                          for j in range(len(R.pieces[n + 1]))]))
                       for k in range(len(R.pieces[n + 1]))]
        else:
            t_image = []
        quotients[n] = QuotientBasis(Subspace.span(field, d, t_image), Subspace.whole(field, d))
        dims[n] = quotients[n].rank
    gr_q = {n: QuotientBasis(R.base.F(n + 1), R.base.F(n)) for n in quotients}
    images = {}
    for n, q in quotients.items():
        if q.rank != len(gr.labels.get(n, [])):
            ok = False
            continue
        images[n] = [gr_q[n].coords(R.to_A(n, rep)) for rep in q.reps]
        if q.rank and Subspace.span(field, q.rank, images[n]).rank != q.rank:
            ok = False
        for i, img in enumerate(images[n]):
            witness.append({"weight": n, "class": i, "image": [field.format(c) for c in img]})
    # multiplicativity of the weight-preserving basis map
    if ok:
        for m, qm in quotients.items():
            for n, qn in quotients.items():
                if n < m or m + n not in quotients:
                    continue
                target = gr_q[m + n]
                for u, iu in zip(qm.reps, images[m]):
                    for v, iv in zip(qn.reps, images[n]):
                        res = R.multiply(m, u, n, v)
                        lhs = [field.zero] * target.rank
                        if res is not None:
                            lhs = target.coords(R.to_A(*res))
                        rhs = gr.multiply(m, iu, n, iv)
                        if len(lhs) != len(rhs) or any(x != y for x, y in zip(lhs, rhs)):
                            ok = False
    return FiberResult(0, dims, ok, witness, algebra=gr)


def rees_comultiplication(G: FormalGroupLaw, var: str = "t") -> FormalGroupLaw:
    """The group law carried by the Rees algebra of the (x)-adic filtration.

    In Rees coordinates ``X' = x t^-1``; a monomial ``x1^i x2^j`` of the
    coproduct lies in filtration degree ``d`` of the two-variable adic
    filtration, so it equals ``t^d X1'^i X2'^j`` and contributes
    ``t^(d-1)`` to ``Delta(X')``. The degree ``d`` is read off the filtration.
    """
    N = G.N
    field = G.ring
    R = PolynomialRing(field, (var,))
    (t,) = R.gens
    if field.is_field:
        A2 = PresentedAlgebra(field, ("x1", "x2"), (), N)
        FA2 = adic_filtration(A2, ["x1", "x2"], N)

        def degree(e):
            v = A2.monomial(e).coords
            d = 0
            while d <= N and FA2.F(d + 1).contains(v):
                d += 1
            return d
    else:
        def degree(e):
            return sum(e)
    coeffs = {}
    for (i, j), c in G.coeffs.items():
        d = degree((i, j))
        coeffs[(i, j)] = R(c) * t ** (d - 1)
    return law_from_coeffs(R, N, coeffs, validate=True)


# S^0_fil -------------------------------------------------------------------

@dataclass
class S0Fiber:
    at: int
    algebra: PresentedAlgebra
    model: str
    witness: dict

    def to_json(self):
        return {"at": self.at, "algebra": str(self.algebra), "dim": self.algebra.dim,
                "isomorphic_to": self.model, "witness": self.witness}


S0_RELATION = "(t1+t2)*(t1-t2)"


def s0_fil_fibers(k: Ring) -> tuple:
    """Fibers of ``k[t1,t2]/((t1+t2)(t1-t2))`` over ``k[t]``, ``t -> t1``, at t = 1 and t = 0.

    Returns ``(fiber_at_1, fiber_at_0)``, isomorphic to ``k x k`` and
    ``k[eps]/eps^2`` respectively, each with an explicit witness.
    """
    if not k.is_field:
        raise UnsupportedRing(f"{k} is not a field")
    if k.characteristic == 2:
        raise CharacteristicTwo("in characteristic 2 the relation is (t1 + t2)^2 and the fiber at 1 is not split")
    S = PolynomialRing(k, ("t1", "t2"))
    rel = S.parse(S0_RELATION)
    fibers = []
    for c in (1, 0):
        sub = {}
        for (i, j), a in rel.terms.items():
            key = (j,)
            val = a * k(c) ** i if i else a
            sub[key] = sub.get(key, k.zero) + val
        U = PolynomialRing(k, ("t2",))
        f = U.from_terms(sub)
        fibers.append(PresentedAlgebra(k, ("t2",), [f], None))
    one_fiber, zero_fiber = fibers

    # t = 1: idempotents (1 + t2)/2 and (1 - t2)/2 split the algebra
    t2 = one_fiber.generators[0]
    half = k.inverse(k(2))
    e_plus = (one_fiber.one + t2) * half
    e_minus = (one_fiber.one - t2) * half
    split = (one_fiber.dim == 2 and e_plus * e_plus == e_plus and e_minus * e_minus == e_minus
             and not (e_plus * e_minus) and e_plus + e_minus == one_fiber.one and bool(e_plus) and bool(e_minus))
    w1 = {"idempotents": [one_fiber.format(e_plus), one_fiber.format(e_minus)], "verified": split,
          "map": "f -> (f(1), f(-1))"}
    # t = 0: eps = t2 squares to zero
    eps = zero_fiber.generators[0]
    sq0 = zero_fiber.dim == 2 and bool(eps) and not (eps * eps)
    w0 = {"eps": zero_fiber.format(eps), "eps_squared": zero_fiber.format(eps * eps), "verified": sq0}
    return (S0Fiber(1, one_fiber, f"{k} x {k}", w1), S0Fiber(0, zero_fiber, f"{k}[eps]/(eps^2)", w0))
