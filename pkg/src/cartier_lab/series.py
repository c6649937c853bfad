"""Multivariate power series truncated at a total degree ``N``."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    MismatchedContext,
    NonNilpotentSubstitution,
    NonUnitLinearTerm,
)
from .poly import format_terms, monomial_key
from .rings import Ring, ring_from_json


@dataclass(frozen=True)
class PowerSeriesRing:
    """The context shared by series that may be combined: ring, variables, N."""

    ring: Ring
    vars: tuple
    N: int

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if self.N < 0:
            raise ValueError("truncation must be nonnegative")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"repeated variable names in {self.vars}")
        names = set()
        inner = self.ring
        while hasattr(inner, "vars") or hasattr(inner, "var"):
            names |= set(getattr(inner, "vars", ()) or (inner.var,))
            inner = inner.base
        if names & set(self.vars):
            raise ValueError("series variables must differ from the coefficient ring's variables")

    @property
    def nvars(self):
        return len(self.vars)

    @property
    def gens(self):
        n = self.nvars
        one = self.ring.one
        if self.N < 1:
            return tuple(TruncatedSeries(self, {}) for _ in range(n))
        return tuple(TruncatedSeries(self, {tuple(int(i == j) for j in range(n)): one}) for i in range(n))

    def gen(self, name):
        return self.gens[self.vars.index(name)]

    @property
    def one(self) -> "TruncatedSeries":
        return self(1)

    @property
    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {})

    def __call__(self, value) -> "TruncatedSeries":
        if isinstance(value, TruncatedSeries):
            if value.parent != self:
                raise MismatchedContext(f"{value.parent} vs {self}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        c = self.ring(value)
        return TruncatedSeries(self, {(0,) * self.nvars: c} if c else {})

    def from_terms(self, terms) -> "TruncatedSeries":
        items = terms.items() if isinstance(terms, dict) else terms
        out = {}
        for e, c in items:
            e = tuple(e)
            if len(e) != self.nvars:
                raise ValueError(f"exponent {e} has the wrong length for {self.vars}")
            if sum(e) <= self.N:
                c = self.ring(c)
                if c:
                    out[e] = c
        return TruncatedSeries(self, out)

    def parse(self, text: str) -> "TruncatedSeries":
        from .expr import parse_expression
        return self(parse_expression(text, dict(zip(self.vars, self.gens)), self))

    def with_N(self, N: int) -> "PowerSeriesRing":
        return PowerSeriesRing(self.ring, self.vars, N)

    def with_vars(self, names) -> "PowerSeriesRing":
        return PowerSeriesRing(self.ring, tuple(names), self.N)

    def with_ring(self, ring: Ring) -> "PowerSeriesRing":
        return PowerSeriesRing(ring, self.vars, self.N)

    def div_int(self, a, n):
        return self.ring.div_int(a, n)

    def __str__(self):
        return f"{self.ring}[[{','.join(self.vars)}]]/deg>{self.N}"


class TruncatedSeries:
    """Immutable truncated series. ``terms`` never holds zeros or degrees above ``N``."""

    __slots__ = ("parent", "terms")

    def __init__(self, parent: PowerSeriesRing, terms: dict):
        self.parent = parent
        self.terms = terms

    # context ---------------------------------------------------------------

    @property
    def ring(self):
        return self.parent.ring

    @property
    def variables(self):
        return self.parent.vars

    @property
    def N(self):
        return self.parent.N

    def _lift(self, other):
        if isinstance(other, TruncatedSeries):
            if other.parent != self.parent:
                raise MismatchedContext(f"series contexts differ: {other.parent} vs {self.parent}")
            return other
        try:
            return self.parent(other)
        except TypeError:
            return NotImplemented

    # arithmetic ------------------------------------------------------------

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
        return TruncatedSeries(self.parent, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.parent, {e: -c for e, c in self.terms.items()})

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
        N = self.N
        if len(o.terms) == 1 and not any(next(iter(o.terms))):
            c = next(iter(o.terms.values()))
            return TruncatedSeries(self.parent, {e: v for e, v in ((e, a * c) for e, a in self.terms.items()) if v})
        buckets = {}
        for e, c in o.terms.items():
            buckets.setdefault(sum(e), []).append((e, c))
        out = {}
        if self.parent.nvars == 1:
            for (i,), a in self.terms.items():
                for d, items in buckets.items():
                    if i + d > N:
                        continue
                    for (j,), b in items:
                        k = (i + j,)
                        s = out.get(k)
                        out[k] = a * b if s is None else s + a * b
        else:
            for e1, a in self.terms.items():
                room = N - sum(e1)
                for d, items in buckets.items():
                    if d > room:
                        continue
                    for e2, b in items:
                        k = tuple(x + y for x, y in zip(e1, e2))
                        s = out.get(k)
                        out[k] = a * b if s is None else s + a * b
        return TruncatedSeries(self.parent, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        result, base = self.parent.ring.one, self
        result = self.parent(result)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if other.parent != self.parent:
                return False
            return not (self - other).terms
        try:
            o = self._lift(other)
        except (MismatchedContext, ValueError):
            return False
        if o is NotImplemented:
            return NotImplemented
        return not (self - o).terms

    def __hash__(self):
        return hash((self.parent, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return format_terms(self.ring, self.variables, self.terms) + f" + O(deg {self.N + 1})"

    # inspection ------------------------------------------------------------

    def coefficient(self, e):
        return self.terms.get(tuple(e), self.ring.zero)

    def constant_term(self):
        return self.coefficient((0,) * self.parent.nvars)

    def order(self) -> int | None:
        """Lowest total degree carrying a nonzero coefficient (None for 0)."""
        return min((sum(e) for e in self.terms), default=None)

    def homogeneous_part(self, d: int) -> dict:
        return {e: c for e, c in self.terms.items() if sum(e) == d}

    def sorted_terms(self):
        return [(e, self.terms[e]) for e in sorted(self.terms, key=monomial_key)]

    def linear_coefficients(self):
        n = self.parent.nvars
        return [self.coefficient(tuple(int(i == j) for j in range(n))) for i in range(n)]

    # transformations -------------------------------------------------------

    def truncate(self, M: int) -> "TruncatedSeries":
        if M > self.N:
            raise ValueError("cannot raise the truncation of a truncated series")
        parent = self.parent.with_N(M)
        return TruncatedSeries(parent, {e: c for e, c in self.terms.items() if sum(e) <= M})

    def map_coefficients(self, fn, ring: Ring | None = None) -> "TruncatedSeries":
        parent = self.parent if ring is None else self.parent.with_ring(ring)
        out = {}
        for e, c in self.terms.items():
            d = parent.ring(fn(c))
            if d:
                out[e] = d
        return TruncatedSeries(parent, out)

    def rename(self, names) -> "TruncatedSeries":
        return TruncatedSeries(self.parent.with_vars(names), dict(self.terms))

    def derivative(self, var) -> "TruncatedSeries":
        """Partial derivative; the result is only known to degree N-1."""
        i = self.variables.index(var) if isinstance(var, str) else var
        parent = self.parent.with_N(max(self.N - 1, 0))
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                if sum(f) <= parent.N:
                    v = c * e[i]
                    if v:
                        out[tuple(f)] = v
        return TruncatedSeries(parent, out)

    def integrate(self, var=0, N: int | None = None) -> "TruncatedSeries":
        """Termwise antiderivative; each step divides by an integer, which must be a unit."""
        i = self.variables.index(var) if isinstance(var, str) else var
        parent = self.parent.with_N(self.N + 1 if N is None else N)
        out = {}
        for e, c in self.terms.items():
            f = list(e)
            f[i] += 1
            if sum(f) <= parent.N:
                v = self.parent.div_int(c, f[i])
                if v:
                    out[tuple(f)] = v
        return TruncatedSeries(parent, out)

    def set_zero(self, var) -> "TruncatedSeries":
        i = self.variables.index(var) if isinstance(var, str) else var
        return TruncatedSeries(self.parent, {e: c for e, c in self.terms.items() if not e[i]})

    def reciprocal(self) -> "TruncatedSeries":
        c0 = self.constant_term()
        if not self.ring.is_unit(c0):
            raise ZeroDivisionError("constant term is not a unit")
        u = self.ring.inverse(c0)
        h = self * u - 1
        total = self.parent(1)
        term = self.parent(1)
        for _ in range(self.N):
            term = term * (-h)
            if not term:
                break
            total = total + term
        return total * u

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "vars": list(self.variables),
            "N": self.N,
            "terms": [[list(e), self.ring.format(c)] for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncatedSeries":
        ring = ring_from_json(obj["ring"])
        parent = PowerSeriesRing(ring, tuple(obj["vars"]), int(obj["N"]))
        return parent.from_terms([(tuple(e), ring.parse(c)) for e, c in obj["terms"]])


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if not isinstance(b, TruncatedSeries) or a.parent != b.parent:
        raise MismatchedContext("series_add needs a common ring, variable list and N")
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if not isinstance(b, TruncatedSeries) or a.parent != b.parent:
        raise MismatchedContext("series_mul needs a common ring, variable list and N")
    return a * b


def series_compose(f: TruncatedSeries, args) -> TruncatedSeries:
    """``f(args)``: substitute one series per variable of ``f``.

    All arguments share a context (ring, variables, N) which becomes the
    context of the result; each must have zero constant term. The result is
    exact up to ``min(f.N, N)``.
    """
    args = list(args)
    if len(args) != f.parent.nvars:
        raise ValueError(f"{f.parent.nvars} arguments expected, got {len(args)}")
    if not args:
        return f
    target = args[0].parent
    for a in args:
        if a.parent != target:
            raise MismatchedContext("composition arguments must share a context")
        if a.constant_term():
            raise NonNilpotentSubstitution("argument has a nonzero constant term")
    if target.ring != f.ring:
        raise MismatchedContext(f"coefficient rings differ: {f.ring} vs {target.ring}")
    if f.N < target.N:
        target = target.with_N(f.N)
        args = [a.truncate(f.N) for a in args]
    return _horner(f.terms, args, target)


def _horner(terms: dict, args, target: PowerSeriesRing) -> TruncatedSeries:
    if not args:
        c = terms.get((), None)
        return target(c) if c is not None else TruncatedSeries(target, {})
    groups = {}
    for e, c in terms.items():
        if e[0] <= target.N:
            groups.setdefault(e[0], {})[e[1:]] = c
    if not groups:
        return TruncatedSeries(target, {})
    top = max(groups)
    acc = _horner(groups[top], args[1:], target)
    for i in range(top - 1, -1, -1):
        acc = acc * args[0]
        if i in groups:
            acc = acc + _horner(groups[i], args[1:], target)
    return acc


def series_reversion(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of a univariate series with unit linear coefficient."""
    if f.parent.nvars != 1:
        raise ValueError("reversion needs a univariate series")
    if f.constant_term():
        raise NonNilpotentSubstitution("series to invert has a nonzero constant term")
    u = f.coefficient((1,))
    if not f.ring.is_unit(u):
        raise NonUnitLinearTerm(f"linear coefficient {f.ring.format(u)} is not a unit")
    uinv = f.ring.inverse(u)
    parent = f.parent
    g = TruncatedSeries(parent, {(1,): uinv}) if f.N >= 1 else TruncatedSeries(parent, {})
    # fix one more coefficient of g per pass
    for d in range(2, f.N + 1):
        c = series_compose(f, [g]).coefficient((d,))
        if c:
            g = g - TruncatedSeries(parent, {(d,): c * uinv})
    return g
