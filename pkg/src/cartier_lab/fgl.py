"""One-dimensional commutative formal group laws at a fixed truncation."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    AxiomViolation,
    IllFormedRingMap,
    IndeterminateAtTruncation,
    MismatchedContext,
    NonInvertibleInteger,
    NonUnitLinearTerm,
)
from .poly import PolynomialRing, format_monomial, monomial_key
from .rings import Ring, RingMap, ZZ, is_prime, ring_from_json
from .series import PowerSeriesRing, TruncatedSeries, series_compose, series_reversion

LAW_VARS = ("X", "Y")


@dataclass(frozen=True, eq=False)
class FormalGroupLaw:
    """A validated law ``F(X, Y)``. Construct through :func:`check_fgl_axioms`."""

    series: TruncatedSeries

    @property
    def ring(self) -> Ring:
        return self.series.ring

    @property
    def N(self) -> int:
        return self.series.N

    @property
    def coeffs(self) -> dict:
        """The table ``a_ij`` (i, j >= 1) of the non-linear part."""
        return {e: c for e, c in self.series.terms.items() if e[0] >= 1 and e[1] >= 1}

    def coefficient(self, i: int, j: int):
        return self.series.coefficient((i, j))

    def __eq__(self, other):
        return isinstance(other, FormalGroupLaw) and self.series == other.series

    def __hash__(self):
        return hash(self.series)

    def __call__(self, u, v):
        """``F(u, v)`` for series ``u, v`` sharing a context."""
        return series_compose(self.series, [u, v])

    def univariate(self, name: str = "X") -> PowerSeriesRing:
        return PowerSeriesRing(self.ring, (name,), self.N)

    def describe(self) -> str:
        table = self.coeffs
        if not table:
            return "additive"
        if self.N >= 2 and len(table) == 1 and table.get((1, 1)) == 1:
            return "multiplicative"
        return "law"

    def to_json(self) -> dict:
        items = sorted(self.coeffs.items(), key=lambda t: monomial_key(t[0]))
        return {
            "ring": self.ring.to_json(),
            "N": self.N,
            "coeffs": [[i, j, self.ring.format(c)] for (i, j), c in items],
        }

    @classmethod
    def from_json(cls, obj: dict, validate: bool = True) -> "FormalGroupLaw":
        ring = ring_from_json(obj["ring"]) if "ring" in obj else ZZ
        coeffs = {(int(i), int(j)): ring.parse(str(c)) for i, j, c in obj.get("coeffs", [])}
        return law_from_coeffs(ring, int(obj["N"]), coeffs, validate=validate)

    def __repr__(self):
        return f"FormalGroupLaw({self.series!r} over {self.ring})"


def law_from_coeffs(ring: Ring, N: int, coeffs: dict, validate: bool = True) -> FormalGroupLaw:
    for (i, j) in coeffs:
        if i < 1 or j < 1:
            raise ValueError(f"coefficient table entries need i, j >= 1, got {(i, j)}")
    S = PowerSeriesRing(ring, LAW_VARS, N)
    terms = {(1, 0): 1, (0, 1): 1} if N >= 1 else {}
    terms.update(coeffs)
    F = S.from_terms(terms)
    return check_fgl_axioms(F) if validate else FormalGroupLaw(F)


def additive_law(ring: Ring = ZZ, N: int = 8) -> FormalGroupLaw:
    return law_from_coeffs(ring, N, {}, validate=False)


def multiplicative_law(ring: Ring = ZZ, N: int = 8, t=1) -> FormalGroupLaw:
    """``X + Y + t XY``."""
    t = ring(t)
    return law_from_coeffs(ring, N, {(1, 1): t} if t else {}, validate=False)


def _first_offence(diff: TruncatedSeries):
    e, c = diff.sorted_terms()[0]
    return format_monomial(diff.variables, e) or "1", diff.ring.format(c)


def check_fgl_axioms(F: TruncatedSeries, N: int | None = None) -> FormalGroupLaw:
    """Validate ``F(X, Y)`` as a commutative formal group law up to degree N.

    Axioms are tried in the order constant term, commutativity, unit,
    associativity; the first failure raises :class:`AxiomViolation` naming the
    lowest offending monomial in graded-lex order.
    """
    if F.parent.nvars != 2:
        raise ValueError("a formal group law is a series in two variables")
    if N is not None:
        F = F.truncate(N)
    if F.variables != LAW_VARS:
        F = F.rename(LAW_VARS)
    c0 = F.constant_term()
    if c0:
        raise AxiomViolation("constant-term", "1", F.ring.format(c0))

    swapped = TruncatedSeries(F.parent, {(j, i): c for (i, j), c in F.terms.items()})
    diff = F - swapped
    if diff:
        raise AxiomViolation("commutativity", *_first_offence(diff))

    X, Y = F.parent.gens
    diff = F.set_zero("Y") - X
    if diff:
        raise AxiomViolation("unit", *_first_offence(diff))
    diff = F.set_zero("X") - Y
    if diff:
        raise AxiomViolation("unit", *_first_offence(diff))

    T = PowerSeriesRing(F.ring, ("X", "Y", "Z"), F.N)
    x, y, z = T.gens
    left = series_compose(F, [series_compose(F, [x, y]), z])
    right = series_compose(F, [x, series_compose(F, [y, z])])
    diff = left - right
    if diff:
        raise AxiomViolation("associativity", *_first_offence(diff))
    return FormalGroupLaw(F)


def formal_inverse(G: FormalGroupLaw) -> TruncatedSeries:
    """``i(X)`` with ``F(X, i(X)) = 0``, solved one degree at a time (any characteristic)."""
    S = G.univariate()
    (X,) = S.gens
    inv = -X
    for d in range(2, G.N + 1):
        c = G(X, inv).coefficient((d,))
        if c:
            inv = inv - TruncatedSeries(S, {(d,): c})
    return inv


def n_series(G: FormalGroupLaw, n: int) -> TruncatedSeries:
    """The ``[n]``-series, by double-and-add on the group law."""
    S = G.univariate()
    (X,) = S.gens
    if n < 0:
        return series_compose(formal_inverse(G), [n_series(G, -n)])
    result = TruncatedSeries(S, {})
    addend = X
    while n:
        if n & 1:
            result = G(result, addend)
        n >>= 1
        if n:
            addend = G(addend, addend)
    return result


@dataclass(frozen=True)
class Height:
    """Height of a law in characteristic p. ``value=None`` means no term of
    ``[p](X)`` was seen up to degree ``truncation``."""

    value: int | None
    p: int
    truncation: int

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self):
        if self.value is None:
            return f"infinity at truncation N={self.truncation}"
        return str(self.value)

    def to_json(self):
        return {"height": self.value, "infinite_at_truncation": self.value is None,
                "p": self.p, "N": self.truncation}


def height(G: FormalGroupLaw, p: int | None = None) -> Height:
    char = G.ring.characteristic
    if not is_prime(char):
        raise ValueError(f"height needs a ring of prime characteristic, got {G.ring}")
    if p is not None and p != char:
        raise ValueError(f"p={p} differs from the characteristic {char}")
    p = char
    if G.N < p:
        raise IndeterminateAtTruncation(f"N={G.N} < p={p}: even height 1 is not visible")
    ps = n_series(G, p)
    d = ps.order()
    if d is None:
        return Height(None, p, G.N)
    lead = ps.coefficient((d,))
    h, q = 0, 1
    while q < d:
        q *= p
        h += 1
    if q != d or not G.ring.is_unit(lead):
        raise IndeterminateAtTruncation(
            f"[p](X) starts with {G.ring.format(lead)}*X^{d}, not a unit times X^(p^h)")
    return Height(h, p, G.N)


def _require_integer_units(ring: Ring, N: int):
    for n in range(2, N + 1):
        if not ring.is_unit(ring(n)):
            raise NonInvertibleInteger(f"{n} is not a unit in {ring}; logarithm undefined")


def fgl_log(G: FormalGroupLaw) -> TruncatedSeries:
    """Logarithm from the invariant differential: ``log'(X) = 1 / F_Y(X, 0)``."""
    _require_integer_units(G.ring, G.N)
    dFdY = G.series.derivative("Y").set_zero("Y")
    S = PowerSeriesRing(G.ring, ("X",), max(G.N - 1, 0))
    diff = S.from_terms({(e[0],): c for e, c in dFdY.terms.items()})
    return diff.reciprocal().integrate(0, N=G.N)


def fgl_exp(log: TruncatedSeries) -> FormalGroupLaw:
    """The law ``exp(log(X) + log(Y))`` with ``exp`` the compositional inverse of ``log``."""
    if log.parent.nvars != 1:
        raise ValueError("a logarithm is a univariate series")
    if log.constant_term() or log.coefficient((1,)) != 1:
        raise NonUnitLinearTerm("a logarithm needs zero constant term and linear coefficient 1")
    exp = series_reversion(log)
    S2 = PowerSeriesRing(log.ring, LAW_VARS, log.N)
    X, Y = S2.gens
    total = series_compose(log, [X]) + series_compose(log, [Y])
    return check_fgl_axioms(series_compose(exp, [total]))


def deform_to_normal_cone(G: FormalGroupLaw, var: str = "lam", validate: bool = True) -> FormalGroupLaw:
    """``F_lam(X, Y) = lam^-1 F(lam X, lam Y)`` over ``R[lam]``: ``a_ij -> a_ij lam^(i+j-1)``."""
    R = PolynomialRing(G.ring, (var,))
    (lam,) = R.gens
    coeffs = {(i, j): R(c) * lam ** (i + j - 1) for (i, j), c in G.coeffs.items()}
    return law_from_coeffs(R, G.N, coeffs, validate=validate)


def base_change(G: FormalGroupLaw, phi: RingMap, validate: bool = True) -> FormalGroupLaw:
    if phi.source != G.ring:
        raise IllFormedRingMap(f"ring map starts at {phi.source}, law lives over {G.ring}")
    coeffs = {}
    for e, c in G.coeffs.items():
        try:
            d = phi(c)
        except (TypeError, ValueError, MismatchedContext) as exc:
            raise IllFormedRingMap(str(exc)) from None
        if d:
            coeffs[e] = d
    return law_from_coeffs(phi.target, G.N, coeffs, validate=validate)


def conjugate(G: FormalGroupLaw, phi: TruncatedSeries, validate: bool = True) -> FormalGroupLaw:
    """Transport ``G`` along the isomorphism ``phi``: ``phi^-1(F(phi X, phi Y))``."""
    if phi.parent != G.univariate():
        phi = phi.rename(("X",))
    inv = series_reversion(phi)
    S2 = G.series.parent
    X, Y = S2.gens
    inner = G(series_compose(phi, [X]), series_compose(phi, [Y]))
    F = series_compose(inv, [inner])
    return check_fgl_axioms(F) if validate else FormalGroupLaw(F)


def honda_logarithm(ring: Ring, p: int, h: int, N: int) -> TruncatedSeries:
    """``sum_k X^(p^(hk)) / p^k``, the logarithm of the height-h Honda law."""
    S = PowerSeriesRing(ring, ("X",), N)
    terms, k = {}, 0
    while p ** (h * k) <= N:
        terms[(p ** (h * k),)] = ring.div_int(ring.one, p ** k)
        k += 1
    return S.from_terms(terms)
