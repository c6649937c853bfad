"""Exact coefficient rings.

A ring descriptor is a small frozen value object; its elements are plain
Python values with operator support:

* ``Integers``        -> ``int``
* ``Rationals``       -> ``fractions.Fraction``
* ``IntegersMod(m)``  -> ``ModInt``
* ``PolynomialRing``  -> ``cartier_lab.poly.Poly``
* ``QuotientRing``    -> ``QElem`` (``base[v]/(f)`` with ``f`` monic)

Descriptors coerce ints (and fractions whose denominator is a unit) into
elements via ``ring(value)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    IllFormedRingMap,
    MismatchedContext,
    NonInvertibleInteger,
    RingNotFinite,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class Ring:
    """Common interface of every coefficient ring descriptor."""

    kind = "Ring"

    def __call__(self, value):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    @property
    def characteristic(self) -> int:
        raise NotImplementedError

    @property
    def is_field(self) -> bool:
        return False

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def size(self) -> int:
        raise RingNotFinite(f"{self} is not finite")

    def elements(self):
        raise RingNotFinite(f"{self} is not finite")

    def contains(self, a) -> bool:
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inverse(self, a):
        raise NotImplementedError

    def is_nilpotent(self, a) -> bool:
        raise NotImplementedError

    def div_int(self, a, n: int):
        """``a / n``; only allowed when ``n`` is a unit of the ring."""
        d = self(n)
        if not self.is_unit(d):
            raise NonInvertibleInteger(f"{n} is not a unit in {self}")
        return a * self.inverse(d)

    def format(self, a) -> str:
        return str(a)

    def format_plain(self, a) -> str:
        """Coefficient text used inside polynomial expressions."""
        return self.format(a)

    def parse(self, text: str):
        from .expr import parse_expression
        return self(parse_expression(text, {}, self))

    def to_json(self) -> dict:
        raise NotImplementedError

    def random_element(self, rng, size: int = 5):
        raise NotImplementedError


@dataclass(frozen=True)
class Integers(Ring):
    kind = "Integers"

    def __call__(self, value):
        if isinstance(value, bool):
            return int(value)
        if isinstance(value, int):
            return value
        if isinstance(value, Fraction) and value.denominator == 1:
            return value.numerator
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {value!r} into Z")

    @property
    def characteristic(self):
        return 0

    def contains(self, a):
        return isinstance(a, int)

    def is_unit(self, a):
        return a in (1, -1)

    def inverse(self, a):
        if a not in (1, -1):
            raise ZeroDivisionError(f"{a} is not a unit in Z")
        return a

    def is_nilpotent(self, a):
        return a == 0

    def parse(self, text):
        return int(text.strip())

    def to_json(self):
        return {"kind": "Integers"}

    def random_element(self, rng, size=5):
        return rng.randint(-size, size)

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class Rationals(Ring):
    kind = "Rationals"

    def __call__(self, value):
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {value!r} into Q")

    @property
    def characteristic(self):
        return 0

    @property
    def is_field(self):
        return True

    def contains(self, a):
        return isinstance(a, (int, Fraction))

    def is_unit(self, a):
        return a != 0

    def inverse(self, a):
        return 1 / Fraction(a)

    def is_nilpotent(self, a):
        return a == 0

    def format(self, a):
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def parse(self, text):
        return Fraction(text.strip())

    def to_json(self):
        return {"kind": "Rationals"}

    def random_element(self, rng, size=5):
        return Fraction(rng.randint(-size, size), rng.randint(1, size))

    def __str__(self):
        return "Q"


class ModInt:
    """Residue class modulo ``m``."""

    __slots__ = ("v", "m")

    def __init__(self, v: int, m: int):
        self.v = v % m
        self.m = m

    def _lift(self, other):
        if isinstance(other, ModInt):
            if other.m != self.m:
                raise MismatchedContext(f"residues mod {self.m} and mod {other.m}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            try:
                return other.numerator * pow(other.denominator, -1, self.m)
            except ValueError:
                raise NonInvertibleInteger(f"{other.denominator} is not a unit mod {self.m}") from None
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else ModInt(self.v + o, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else ModInt(self.v - o, self.m)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else ModInt(o - self.v, self.m)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else ModInt(self.v * o, self.m)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.v, self.m)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        return ModInt(pow(self.v, e, self.m), self.m)

    def __eq__(self, other):
        o = self._lift(other) if isinstance(other, (ModInt, int)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return (self.v - o) % self.m == 0

    def __hash__(self):
        return hash((self.v, self.m))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"{self.v} mod {self.m}"


@dataclass(frozen=True)
class IntegersMod(Ring):
    m: int
    kind = "IntegersMod"

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"IntegersMod needs m >= 2, got {self.m!r}")

    def __call__(self, value):
        if isinstance(value, ModInt):
            if value.m != self.m:
                raise MismatchedContext(f"residue mod {value.m} is not in Z/{self.m}")
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return ModInt(value, self.m)
        if isinstance(value, Fraction):
            return ModInt(0, self.m) + value
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {value!r} into Z/{self.m}")

    @property
    def characteristic(self):
        return self.m

    @property
    def is_field(self):
        return is_prime(self.m)

    @property
    def is_finite(self):
        return True

    @property
    def size(self):
        return self.m

    def elements(self):
        return [ModInt(v, self.m) for v in range(self.m)]

    def contains(self, a):
        return isinstance(a, ModInt) and a.m == self.m

    def is_unit(self, a):
        return gcd(self(a).v, self.m) == 1

    def inverse(self, a):
        a = self(a)
        try:
            return ModInt(pow(a.v, -1, self.m), self.m)
        except ValueError:
            raise ZeroDivisionError(f"{a} is not a unit") from None

    def is_nilpotent(self, a):
        v = self(a).v
        return all(v % q == 0 for q in prime_factors(self.m))

    def format(self, a):
        return f"{self(a).v} mod {self.m}"

    def format_plain(self, a):
        return str(self(a).v)

    def parse(self, text):
        text = text.strip()
        if " mod " in text:
            r, m = text.split(" mod ")
            if int(m) != self.m:
                raise MismatchedContext(f"residue {text!r} is not in Z/{self.m}")
            return ModInt(int(r), self.m)
        from .expr import parse_expression
        return self(parse_expression(text, {}, self))

    def to_json(self):
        return {"kind": "IntegersMod", "m": self.m}

    def random_element(self, rng, size=5):
        return ModInt(rng.randrange(self.m), self.m)

    def __str__(self):
        return f"Z/{self.m}"


class QElem:
    """Element of ``base[v]/(f)``: coefficient tuple of length ``deg f``."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: "QuotientRing", c):
        self.ring = ring
        self.c = tuple(c)

    def _lift(self, other):
        if isinstance(other, QElem):
            if other.ring != self.ring:
                raise MismatchedContext(f"{other.ring} vs {self.ring}")
            return other
        try:
            return self.ring(other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QElem(self.ring, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return QElem(self.ring, [-a for a in self.c])

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QElem(self.ring, [a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self.ring._mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.ring.inverse(self) ** (-e)
        result, base = self.ring.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, (QElem, int, ModInt, Fraction)):
            return NotImplemented
        o = self._lift(other)
        return all(not (a - b) for a, b in zip(self.c, o.c))

    def __hash__(self):
        return hash((self.ring, self.c))

    def __bool__(self):
        return any(bool(a) for a in self.c)

    def __repr__(self):
        return self.ring.format(self)


@dataclass(frozen=True)
class QuotientRing(Ring):
    """``base[var]/(modulus)``, modulus monic, coefficients listed low to high."""

    base: Ring
    var: str
    modulus: tuple
    kind = "Quotient"

    def __post_init__(self):
        mod = tuple(self.base(c) for c in self.modulus)
        if len(mod) < 2 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        object.__setattr__(self, "modulus", mod)

    @property
    def degree(self):
        return len(self.modulus) - 1

    def __call__(self, value):
        if isinstance(value, QElem):
            if value.ring != self:
                raise MismatchedContext(f"{value.ring} vs {self}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (list, tuple)):
            c = [self.base(x) for x in value] + [self.base.zero] * self.degree
            return self._reduce(c)
        return QElem(self, [self.base(value)] + [self.base.zero] * (self.degree - 1))

    @property
    def generator(self):
        return self([0, 1])

    def _reduce(self, c):
        c = list(c)
        d = self.degree
        for i in range(len(c) - 1, d - 1, -1):
            lead = c[i]
            if lead:
                for j in range(d + 1):
                    c[i - d + j] = c[i - d + j] - lead * self.modulus[j]
        c = c[:d] + [self.base.zero] * max(0, d - len(c))
        return QElem(self, c)

    def _mul(self, a, b):
        prod = [self.base.zero] * (2 * self.degree - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    prod[i + j] = prod[i + j] + x * y
        return self._reduce(prod)

    @property
    def characteristic(self):
        return self.base.characteristic

    @property
    def is_finite(self):
        return self.base.is_finite

    @property
    def size(self):
        return self.base.size ** self.degree

    @property
    def is_field(self):
        if not self.base.is_field:
            return False
        if self.degree == 1:
            return True
        if not self.base.is_finite:
            return False
        return _is_irreducible(self.base, self.modulus)

    def elements(self):
        base_elems = self.base.elements()
        return [QElem(self, reversed(t)) for t in itertools.product(base_elems, repeat=self.degree)]

    def contains(self, a):
        return isinstance(a, QElem) and a.ring == self

    def is_unit(self, a):
        try:
            self.inverse(a)
            return True
        except ZeroDivisionError:
            return False

    def inverse(self, a):
        a = self(a)
        if self.base.is_field:
            inv = _poly_inverse_mod(self.base, list(a.c), list(self.modulus))
            if inv is None:
                raise ZeroDivisionError(f"{a} is not a unit in {self}")
            return self._reduce(inv)
        if self.is_finite:
            for b in self.elements():
                if a * b == 1:
                    return b
            raise ZeroDivisionError(f"{a} is not a unit in {self}")
        # unit part plus nilpotent part, via a terminating geometric series
        c0 = a.c[0]
        if not self.base.is_unit(c0):
            raise ZeroDivisionError(f"cannot invert {a} in {self}")
        u = self(self.base.inverse(c0))
        n = 1 - a * u
        if not self.is_nilpotent(n):
            raise ZeroDivisionError(f"cannot invert {a} in {self}")
        total, term = self.one, self.one
        while term:
            term = term * n
            total = total + term
        return total * u

    def is_nilpotent(self, a):
        a = self(a)
        if self.is_finite:
            x = a
            for _ in range(self.size.bit_length() + 1):
                if not x:
                    return True
                x = x * x
            return not x
        x = a
        for _ in range(64):
            if not x:
                return True
            x = x * x
        return False

    def format(self, a):
        return _format_univariate(self.base, self.var, self(a).c)

    def to_json(self):
        return {
            "kind": "Quotient",
            "base": self.base.to_json(),
            "var": self.var,
            "modulus": [self.base.format(c) for c in self.modulus],
        }

    def parse(self, text):
        from .expr import parse_expression
        return self(parse_expression(text, {self.var: self.generator}, self))

    def random_element(self, rng, size=5):
        return QElem(self, [self.base.random_element(rng, size) for _ in range(self.degree)])

    def __str__(self):
        mod = _format_univariate(self.base, self.var, self.modulus)
        return f"{self.base}[{self.var}]/({mod})"


def _format_univariate(base, var, coeffs):
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        s = base.format_plain(c)
        if i == 0:
            parts.append(s)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            parts.append(mono if s == "1" else f"-{mono}" if s == "-1" else f"{s}*{mono}")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def _strip(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def _poly_divmod(field, a, b):
    a, b = _strip(a), _strip(b)
    q = [field.zero] * max(0, len(a) - len(b) + 1)
    inv = field.inverse(b[-1])
    while len(a) >= len(b) and a:
        coef = a[-1] * inv
        shift = len(a) - len(b)
        q[shift] = coef
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - coef * y
        a = _strip(a)
    return q, a


def _poly_inverse_mod(field, a, f):
    """Inverse of ``a`` modulo ``f`` over a field, or None."""
    r0, r1 = _strip(f), _strip(a)
    s0, s1 = [], [field.one]
    while r1:
        q, r = _poly_divmod(field, r0, r1)
        prod = _poly_mul(field, q, s1)
        s = [x - y for x, y in itertools.zip_longest(s0, prod, fillvalue=field.zero)]
        r0, r1, s0, s1 = r1, r, s1, _strip(s)
    if len(r0) != 1:
        return None
    inv = field.inverse(r0[0])
    return [x * inv for x in s0]


def _poly_mul(field, a, b):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _is_irreducible(field, f):
    d = len(f) - 1
    elems = field.elements()
    for k in range(1, d // 2 + 1):
        for tail in itertools.product(elems, repeat=k):
            g = list(tail) + [field.one]
            _, r = _poly_divmod(field, list(f), g)
            if not r:
                return False
    return True


def finite_field(q: int, var: str = "a") -> Ring:
    """GF(q) as ``Z/p`` (q prime) or ``Z/p[var]/(f)`` with the first irreducible monic f."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    base = IntegersMod(p)
    if k == 1:
        return base
    elems = base.elements()
    for tail in itertools.product(range(p), repeat=k):
        f = tuple(reversed(tail)) + (1,)
        if _is_irreducible(base, [elems[c] for c in f]):
            return QuotientRing(base, var, f)
    raise AssertionError("no irreducible polynomial found")


def truncated_polynomial_ring(base: Ring, var: str = "eps", order: int = 2) -> QuotientRing:
    """``base[var]/(var^order)``."""
    return QuotientRing(base, var, tuple([0] * order + [1]))


ZZ = Integers()
QQ = Rationals()


def ring_from_json(obj: dict) -> Ring:
    kind = obj["kind"]
    if kind == "Integers":
        return ZZ
    if kind == "Rationals":
        return QQ
    if kind == "IntegersMod":
        return IntegersMod(int(obj["m"]))
    if kind == "PolynomialExtension":
        from .poly import PolynomialRing
        return PolynomialRing(ring_from_json(obj["base"]), tuple(obj["vars"]))
    if kind == "Quotient":
        base = ring_from_json(obj["base"])
        return QuotientRing(base, obj["var"], tuple(base.parse(c) for c in obj["modulus"]))
    raise ValueError(f"unknown ring kind {kind!r}")


def parse_ring(spec: str) -> Ring:
    """Parse a command-line ring spec.

    ``Z``, ``Q``, ``Zmod:M`` (or ``Z/M``), ``GF(q)``, ``GF(q)[eps]``,
    ``GF(q)[eps^d]`` and ``poly:<base>:v1,v2``.
    """
    s = spec.strip()
    if s == "Z":
        return ZZ
    if s == "Q":
        return QQ
    if s.startswith("Zmod:"):
        return IntegersMod(int(s[5:]))
    if s.startswith("Z/"):
        return IntegersMod(int(s[2:]))
    if s.startswith("poly:"):
        from .poly import PolynomialRing
        base, _, names = s[5:].rpartition(":")
        return PolynomialRing(parse_ring(base), tuple(n.strip() for n in names.split(",")))
    if s.startswith("GF(") and ")" in s:
        close = s.index(")")
        field = finite_field(int(s[3:close]))
        rest = s[close + 1:].strip()
        if not rest:
            return field
        if rest.startswith("[") and rest.endswith("]"):
            inner = rest[1:-1]
            var, _, order = inner.partition("^")
            return truncated_polynomial_ring(field, var.strip(), int(order) if order else 2)
    raise ValueError(f"cannot parse ring spec {spec!r}")


class RingMap:
    """A ring homomorphism given by an element function."""

    def __init__(self, source: Ring, target: Ring, fn, description: str = ""):
        self.source = source
        self.target = target
        self._fn = fn
        self.description = description

    def __call__(self, a):
        return self.target(self._fn(a))

    def __repr__(self):
        return f"RingMap({self.source} -> {self.target}: {self.description})"

    @classmethod
    def identity(cls, ring: Ring) -> "RingMap":
        return cls(ring, ring, lambda a: a, "identity")

    @classmethod
    def canonical(cls, source: Ring, target: Ring) -> "RingMap":
        """The unique map out of Z, the reduction Z/m -> Z/d, Q -> Z/p localisation, or inclusions."""
        if source == target:
            return cls.identity(source)
        if isinstance(source, Integers):
            return cls(source, target, target, "structure map from Z")
        if isinstance(source, Rationals):
            def q_map(a):
                a = Fraction(a)
                den = target(a.denominator)
                if not target.is_unit(den):
                    raise IllFormedRingMap(f"denominator {a.denominator} is not invertible in {target}")
                return target(a.numerator) * target.inverse(den)
            return cls(source, target, q_map, "localisation of Q")
        if isinstance(source, IntegersMod):
            if target.characteristic and source.m % target.characteristic == 0:
                return cls(source, target, lambda a: target(a.v), "reduction")
            raise IllFormedRingMap(f"no ring map {source} -> {target}")
        from .poly import PolynomialRing
        if isinstance(target, PolynomialRing) and (target.base == source or _embeds(source, target.base)):
            inner = cls.canonical(source, target.base) if target.base != source else None
            return cls(source, target, (lambda a: target(inner(a))) if inner else target, "inclusion")
        if isinstance(target, QuotientRing) and target.base == source:
            return cls(source, target, target, "inclusion")
        raise IllFormedRingMap(f"no canonical ring map {source} -> {target}")

    @classmethod
    def specialization(cls, source, target: Ring, images: dict, base_map: "RingMap | None" = None) -> "RingMap":
        """Evaluate a polynomial ring ``R[v...]`` at given images in ``target``."""
        from .poly import PolynomialRing
        if not isinstance(source, PolynomialRing):
            raise IllFormedRingMap(f"{source} is not a polynomial ring")
        missing = [v for v in source.vars if v not in images]
        extra = [v for v in images if v not in source.vars]
        if missing or extra:
            raise IllFormedRingMap(f"images must be given exactly for {list(source.vars)}")
        try:
            vals = [target(images[v]) for v in source.vars]
        except (TypeError, ValueError, MismatchedContext) as exc:
            raise IllFormedRingMap(f"image not in {target}: {exc}") from None
        bm = base_map or cls.canonical(source.base, target)
        if bm.source != source.base or bm.target != target:
            raise IllFormedRingMap("base map has the wrong source or target")

        def ev(a):
            a = source(a)
            total = target.zero
            for e, c in a.terms.items():
                term = bm(c)
                for v, k in zip(vals, e):
                    if k:
                        term = term * v ** k
                total = total + term
            return total

        desc = ", ".join(f"{v}->{target.format(x) if hasattr(target, 'format') else x}" for v, x in zip(source.vars, vals))
        return cls(source, target, ev, desc)

    @classmethod
    def coefficientwise(cls, source, base_map: "RingMap") -> "RingMap":
        """Apply ``base_map`` to the coefficients of a polynomial ring ``R[v] -> S[v]``."""
        from .poly import PolynomialRing
        if not isinstance(source, PolynomialRing) or base_map.source != source.base:
            raise IllFormedRingMap("coefficientwise map needs a polynomial ring over the map's source")
        target = PolynomialRing(base_map.target, source.vars)
        return cls(source, target, lambda a: a.map_coefficients(base_map, target), f"coefficients via {base_map.description}")


def _embeds(source, target) -> bool:
    try:
        RingMap.canonical(source, target)
        return True
    except IllFormedRingMap:
        return False
