"""Exact linear algebra over a field: subspaces in reduced row echelon form."""

from __future__ import annotations

from .errors import UnsupportedRing


class Subspace:
    """A subspace of ``field^dim`` kept as a fully reduced echelon basis.

    ``rows`` maps pivot column -> row with a 1 at the pivot and zeros in every
    other pivot column. Instances are treated as immutable values.
    """

    __slots__ = ("field", "dim", "rows", "_nz")

    def __init__(self, field, dim: int, rows: dict | None = None):
        if not field.is_field:
            raise UnsupportedRing(f"linear algebra needs a field, got {field}")
        self.field = field
        self.dim = dim
        self.rows = rows or {}
        # nonzero entries of each row, to keep reductions proportional to sparsity
        self._nz = {k: [(j, x) for j, x in enumerate(r) if x] for k, r in self.rows.items()}

    @classmethod
    def span(cls, field, dim: int, vectors) -> "Subspace":
        S = cls(field, dim)
        for v in vectors:
            S._insert(v)
        return S

    @classmethod
    def whole(cls, field, dim: int) -> "Subspace":
        one, zero = field.one, field.zero
        return cls(field, dim, {i: [one if j == i else zero for j in range(dim)] for i in range(dim)})

    def reduce(self, v) -> list:
        v = list(v)
        for col, nz in self._nz.items():
            c = v[col]
            if c:
                for j, r in nz:
                    v[j] = v[j] - c * r
        return v

    def _insert(self, v) -> bool:
        r = self.reduce(v)
        nz = [(j, x) for j, x in enumerate(r) if x]
        if not nz:
            return False
        col, lead = nz[0]
        if lead != self.field.one:
            inv = self.field.inverse(lead)
            nz = [(j, x * inv) for j, x in nz]
            r = [self.field.zero] * self.dim
            for j, x in nz:
                r[j] = x
        for k, other in self.rows.items():
            c = other[col]
            if c:
                for j, x in nz:
                    other[j] = other[j] - c * x
                self._nz[k] = [(j, x) for j, x in enumerate(other) if x]
        self.rows[col] = r
        self._nz[col] = nz
        return True

    def extended(self, vectors) -> "Subspace":
        S = Subspace(self.field, self.dim, {k: list(v) for k, v in self.rows.items()})
        for v in vectors:
            S._insert(v)
        return S

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list:
        return [self.rows[k] for k in sorted(self.rows)]

    @property
    def pivots(self) -> list:
        return sorted(self.rows)

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.rows.values())

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.dim == other.dim and self.rank == other.rank
                and self.contains_space(other))

    def __hash__(self):
        return hash((self.dim, self.rank))

    def is_zero(self) -> bool:
        return not self.rows

    def __add__(self, other: "Subspace") -> "Subspace":
        return self.extended(other.rows.values())

    def __repr__(self):
        return f"Subspace(rank {self.rank} in dim {self.dim})"


class QuotientBasis:
    """Coordinates on ``sup / sub`` for subspaces ``sub <= sup``.

    ``reps`` are vectors of ``sup`` whose classes form a basis of the quotient.
    """

    def __init__(self, sub: Subspace, sup: Subspace):
        field, dim = sub.field, sub.dim
        self.sub = sub
        self.sup = sup
        self.field = field
        work = Subspace(field, dim, {k: list(v) for k, v in sub.rows.items()})
        self.reps = []
        for v in sup.basis:
            if work._insert(v):
                self.reps.append(list(v))
        # augmented rows [vector | tag]; the tag records the class coordinates
        r = len(self.reps)
        zero, one = field.zero, field.one
        aug = [list(v) + [zero] * r for v in sub.basis]
        aug += [list(v) + [one if j == k else zero for j in range(r)] for k, v in enumerate(self.reps)]
        self._aug = Subspace.span(field, dim + r, aug)
        self._dim = dim

    @property
    def rank(self) -> int:
        return len(self.reps)

    def coords(self, v) -> list:
        """Class coordinates of ``v`` (which must lie in ``sup``)."""
        red = self._aug.reduce(list(v) + [self.field.zero] * self.rank)
        if any(red[: self._dim]):
            raise ValueError("vector does not lie in the ambient subspace")
        return [-x for x in red[self._dim:]]


def rank_of(field, vectors, dim: int) -> int:
    return Subspace.span(field, dim, vectors).rank
