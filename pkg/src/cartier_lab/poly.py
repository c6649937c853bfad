"""Sparse multivariate polynomials over a coefficient ring."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import MismatchedContext
from .rings import ModInt, QElem, Ring


def monomial_key(e):
    """Graded-lex order: total degree first, then the earlier variables first."""
    return (sum(e), tuple(-k for k in e))


def format_monomial(names, e) -> str:
    parts = []
    for v, k in zip(names, e):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_terms(base: Ring, names, terms) -> str:
    """Expression text for a term map, in graded-lex order."""
    out = []
    for e in sorted(terms, key=monomial_key):
        c = terms[e]
        mono = format_monomial(names, e)
        s = base.format_plain(c)
        if " " in s.strip() or ("+" in s) or ("-" in s[1:]):
            s = f"({s})"
        if not mono:
            out.append(s)
        elif s == "1":
            out.append(mono)
        elif s == "-1":
            out.append(f"-{mono}")
        else:
            out.append(f"{s}*{mono}")
    if not out:
        return "0"
    text = " + ".join(out)
    return text.replace("+ -", "- ")


@dataclass(frozen=True)
class PolynomialRing(Ring):
    base: Ring
    vars: tuple
    kind = "PolynomialExtension"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"repeated variable names in {self.vars}")
        inner = self.base
        while isinstance(inner, PolynomialRing):
            if set(inner.vars) & set(self.vars):
                raise ValueError("variable names must be distinct from the base ring's")
            inner = inner.base

    @property
    def nvars(self):
        return len(self.vars)

    @property
    def gens(self):
        n = len(self.vars)
        return tuple(Poly(self, {tuple(int(i == j) for j in range(n)): self.base.one}) for i in range(n))

    def gen(self, name):
        return self.gens[self.vars.index(name)]

    def __call__(self, value):
        if isinstance(value, Poly) and value.ring == self:
            return value
        if isinstance(value, str):
            return self.parse(value)
        c = self.base(value)
        return Poly(self, {(0,) * len(self.vars): c} if c else {})

    def from_terms(self, terms: dict) -> "Poly":
        return Poly(self, {tuple(e): self.base(c) for e, c in terms.items() if c})

    @property
    def characteristic(self):
        return self.base.characteristic

    def contains(self, a):
        return isinstance(a, Poly) and a.ring == self

    def is_nilpotent(self, a):
        return all(self.base.is_nilpotent(c) for c in self(a).terms.values())

    def is_unit(self, a):
        a = self(a)
        c0 = a.constant_term()
        if not self.base.is_unit(c0):
            return False
        return self.is_nilpotent(a - c0)

    def inverse(self, a):
        a = self(a)
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{self.format(a)} is not a unit in {self}")
        u = self.base.inverse(a.constant_term())
        n = 1 - a * u
        total, term = self.one, self.one
        while term:
            term = term * n
            total = total + term
        return total * u

    def format(self, a):
        return format_terms(self.base, self.vars, self(a).terms)

    def parse(self, text):
        from .expr import parse_expression
        return self(parse_expression(text, dict(zip(self.vars, self.gens)), self))

    def to_json(self):
        return {"kind": "PolynomialExtension", "base": self.base.to_json(), "vars": list(self.vars)}

    def random_element(self, rng, size=5, terms=3, degree=2):
        out = {}
        for _ in range(terms):
            e = [0] * len(self.vars)
            for _ in range(rng.randint(0, degree)):
                e[rng.randrange(len(self.vars))] += 1
            out[tuple(e)] = self.base.random_element(rng, size)
        return self.from_terms(out)

    def __str__(self):
        return f"{self.base}[{','.join(self.vars)}]"


class Poly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolynomialRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.ring == self.ring:
                return other
            try:
                return self.ring(other)
            except (TypeError, MismatchedContext):
                raise MismatchedContext(f"{other.ring} vs {self.ring}") from None
        if isinstance(other, (int, Fraction, ModInt, QElem)):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

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
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Poly(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.ring.inverse(self) ** (-k)
        result, base = self.ring.one, self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, (Poly, int, Fraction, ModInt, QElem)):
            return NotImplemented
        try:
            o = self._lift(other)
        except MismatchedContext:
            return False
        return not (self - o).terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return self.ring.format(self)

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.base.zero)

    def coefficient(self, e):
        return self.terms.get(tuple(e), self.ring.base.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var) -> int:
        i = self.ring.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def map_coefficients(self, fn, ring: PolynomialRing | None = None) -> "Poly":
        ring = ring or self.ring
        out = {}
        for e, c in self.terms.items():
            d = ring.base(fn(c))
            if d:
                out[e] = d
        return Poly(ring, out)

    def evaluate(self, values, one=None):
        """Substitute ``values`` (one per variable) using the values' own arithmetic."""
        values = list(values)
        powers = [dict() for _ in values]
        total = None
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    p = powers[i].get(k)
                    if p is None:
                        p = powers[i][k] = values[i] ** k
                    term = p * term
            total = term if total is None else total + term
        if total is None:
            return 0 if one is None else one * 0
        return total
