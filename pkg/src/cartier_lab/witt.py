"""p-typical truncated Witt vectors.

Structure polynomials (sum, product, negation, Frobenius) are obtained by
inverting the ghost map over Z: with ghost components

    w_i(X) = sum_{j<=i} p^j X_j^(p^(i-j)),

a family Z_0, Z_1, ... with prescribed ghosts g_i is

    Z_i = (g_i - sum_{j<i} p^j Z_j^(p^(i-j))) / p^i,

and every division is checked to be exact. The polynomials live in a packed
representation (one Python int per monomial, a fixed bit field per variable)
so that monomial multiplication is a single integer addition.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from .errors import (
    IndexOutOfRange,
    IntegralityFailure,
    MismatchedContext,
    RingNotFinite,
    UnsupportedRing,
)
from .poly import PolynomialRing
from .rings import Ring, ZZ, is_prime


# packed integer polynomials ----------------------------------------------

class _Packing:
    """Exponent vectors of ``nvars`` variables packed into ``bits``-wide fields."""

    def __init__(self, nvars: int, max_exp: int):
        self.nvars = nvars
        self.bits = max(1, max_exp.bit_length())
        self.mask = (1 << self.bits) - 1

    def var(self, k: int, e: int = 1) -> int:
        return e << (self.bits * k)

    def unpack(self, key: int) -> tuple:
        out = []
        for _ in range(self.nvars):
            out.append(key & self.mask)
            key >>= self.bits
        return tuple(out)


def _mul(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _pow(a: dict, e: int) -> dict:
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else _mul(result, base)
        e >>= 1
        if e:
            base = _mul(base, base)
    return result if result is not None else {0: 1}


def _axpy(acc: dict, scale: int, a: dict) -> None:
    for k, c in a.items():
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def _ghost(pk: _Packing, p: int, i: int, offset: int) -> dict:
    """w_i in the variables offset .. offset+i."""
    return {pk.var(offset + j, p ** (i - j)): p ** j for j in range(i + 1)}


def _ghost_inverse(p: int, targets: list) -> list:
    comps, powers = [], []
    for i, g in enumerate(targets):
        powers = [_pow(q, p) for q in powers]
        acc = dict(g)
        for j, q in enumerate(powers):
            _axpy(acc, -(p ** j), q)
        d = p ** i
        z = {}
        for k, c in acc.items():
            q, r = divmod(c, d)
            if r:
                raise IntegralityFailure(f"component {i}: coefficient {c} not divisible by {d}")
            z[k] = q
        comps.append(z)
        powers.append(z)
    return comps


def _ghost_of(p: int, comps: list, i: int) -> dict:
    acc = {}
    for j in range(i + 1):
        _axpy(acc, p ** j, _pow(comps[j], p ** (i - j)))
    return acc


# structure polynomial cache --------------------------------------------

@dataclass(frozen=True)
class _Family:
    packing: _Packing
    names: tuple
    packed: tuple

    def polys(self) -> list:
        R = PolynomialRing(ZZ, self.names)
        unpack = self.packing.unpack
        return [R.from_terms({unpack(k): c for k, c in z.items()}) for z in self.packed]

    def compiled(self) -> list:
        """Per component: list of (coeff, ((var, exp), ...))."""
        unpack = self.packing.unpack
        out = []
        for z in self.packed:
            terms = []
            for k, c in z.items():
                e = unpack(k)
                terms.append((c, tuple((v, x) for v, x in enumerate(e) if x)))
            out.append(terms)
        return out


_cache: dict = {}
_lock = threading.Lock()


def _cached(key, build):
    with _lock:
        fam = _cache.get(key)
    if fam is None:
        fam = build()
        with _lock:
            fam = _cache.setdefault(key, fam)
    return fam


def _names(n: int, letters="XY") -> tuple:
    return tuple(f"{c}{i}" for c in letters for i in range(n))


def _binary_family(p: int, n: int, op: str) -> _Family:
    def build():
        pk = _Packing(2 * n, p ** (n - 1))
        targets = []
        for i in range(n):
            gx, gy = _ghost(pk, p, i, 0), _ghost(pk, p, i, n)
            if op == "sum":
                t = dict(gx)
                _axpy(t, 1, gy)
            else:
                t = _mul(gx, gy)
            targets.append(t)
        return _Family(pk, _names(n), tuple(_ghost_inverse(p, targets)))
    return _cached((op, p, n), build)


def _unary_family(p: int, n: int, op: str) -> _Family:
    def build():
        if op == "neg":
            pk = _Packing(n, p ** (n - 1))
            targets = [{k: -c for k, c in _ghost(pk, p, i, 0).items()} for i in range(n)]
        else:  # frobenius: ghost_i(F x) = ghost_{i+1}(x)
            pk = _Packing(n, p ** (n - 1))
            targets = [_ghost(pk, p, i + 1, 0) for i in range(n - 1)]
        return _Family(pk, _names(n, "X"), tuple(_ghost_inverse(p, targets)))
    return _cached((op, p, n), build)


# public polynomial API -------------------------------------------------

@dataclass(frozen=True)
class WittContext:
    p: int
    n: int
    ring: Ring = ZZ

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 1:
            raise ValueError("Witt vectors need length n >= 1")

    def with_length(self, n: int) -> "WittContext":
        return WittContext(self.p, n, self.ring)

    def __call__(self, components) -> "WittVector":
        comps = tuple(self.ring(c) for c in components)
        if len(comps) != self.n:
            raise ValueError(f"expected {self.n} components, got {len(comps)}")
        return WittVector(self, comps)

    @property
    def zero(self):
        return WittVector(self, (self.ring.zero,) * self.n)

    @property
    def one(self):
        return teichmuller(self, self.ring.one)


def _pn(ctx_or_p, n=None):
    if isinstance(ctx_or_p, WittContext):
        return ctx_or_p.p, ctx_or_p.n
    return ctx_or_p, n


def witt_polynomial(ctx, i: int, n: int | None = None):
    """The ghost component ``w_i`` as a polynomial over Z in ``X0..Xi``."""
    p, length = _pn(ctx, n)
    if length is not None and not 0 <= i < length:
        raise IndexOutOfRange(f"ghost index {i} outside 0..{length - 1}")
    if i < 0:
        raise IndexOutOfRange(f"ghost index {i} is negative")
    R = PolynomialRing(ZZ, tuple(f"X{j}" for j in range(i + 1)))
    gens = R.gens
    return sum((p ** j * gens[j] ** (p ** (i - j)) for j in range(i + 1)), R.zero)


def witt_sum_polys(ctx, n: int | None = None) -> list:
    p, n = _pn(ctx, n)
    return _binary_family(p, n, "sum").polys()


def witt_prod_polys(ctx, n: int | None = None) -> list:
    p, n = _pn(ctx, n)
    return _binary_family(p, n, "prod").polys()


def witt_neg_polys(ctx, n: int | None = None) -> list:
    p, n = _pn(ctx, n)
    return _unary_family(p, n, "neg").polys()


def witt_frobenius_polys(ctx, n: int | None = None) -> list:
    p, n = _pn(ctx, n)
    return _unary_family(p, n, "frob").polys()


def verify_ghost_identities(p: int, n: int) -> dict:
    """Check w_i(S) = w_i(X) + w_i(Y) and w_i(P) = w_i(X) w_i(Y) symbolically.

    Returns a per-component report; every coefficient is an int by
    construction, so integrality is recorded as well.
    """
    fs, fp = _binary_family(p, n, "sum"), _binary_family(p, n, "prod")
    pk = fs.packing
    report = {"p": p, "n": n, "integral": True, "sum": [], "prod": []}
    for fam, key in ((fs, "sum"), (fp, "prod")):
        report["integral"] &= all(isinstance(c, int) for z in fam.packed for c in z.values())
        for i in range(n):
            gx, gy = _ghost(pk, p, i, 0), _ghost(pk, p, i, n)
            if key == "sum":
                want = dict(gx)
                _axpy(want, 1, gy)
            else:
                want = _mul(gx, gy)
            got = _ghost_of(p, list(fam.packed), i)
            report[key].append(got == want)
    report["ok"] = report["integral"] and all(report["sum"]) and all(report["prod"])
    return report


# vectors ---------------------------------------------------------------

class WittVector:
    __slots__ = ("ctx", "components")

    def __init__(self, ctx: WittContext, components: tuple):
        self.ctx = ctx
        self.components = tuple(components)

    def __add__(self, other):
        return witt_add(self, other)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def __eq__(self, other):
        return (isinstance(other, WittVector) and other.ctx == self.ctx
                and all(a == b for a, b in zip(self.components, other.components)))

    def __hash__(self):
        return hash((self.ctx, self.components))

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def is_zero(self):
        return not any(bool(c) for c in self.components)

    def __repr__(self):
        return "(" + ", ".join(self.ctx.ring.format_plain(c) for c in self.components) + ")"

    def to_json(self):
        return [self.ctx.ring.format(c) for c in self.components]


def _evaluate(compiled_terms, values, ring):
    powers = {}
    total = ring.zero
    for c, mono in compiled_terms:
        term = ring(c)
        if not term:
            continue
        for v, e in mono:
            key = (v, e)
            pw = powers.get(key)
            if pw is None:
                pw = powers[key] = values[v] ** e
            term = term * pw
        total = total + term
    return total


def _same_ctx(a: WittVector, b: WittVector):
    if a.ctx != b.ctx:
        raise MismatchedContext(f"Witt contexts differ: {a.ctx} vs {b.ctx}")


def _apply_binary(a, b, op):
    _same_ctx(a, b)
    ctx = a.ctx
    fam = _binary_family(ctx.p, ctx.n, op)
    values = list(a.components) + list(b.components)
    return WittVector(ctx, tuple(_evaluate(t, values, ctx.ring) for t in _compiled(fam)))


_compiled_cache: dict = {}


def _compiled(fam: _Family):
    key = id(fam)
    out = _compiled_cache.get(key)
    if out is None:
        out = _compiled_cache.setdefault(key, (fam, fam.compiled()))
    return out[1]


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    return _apply_binary(a, b, "sum")


def witt_mul(a: WittVector, b: WittVector) -> WittVector:
    return _apply_binary(a, b, "prod")


def witt_neg(a: WittVector) -> WittVector:
    ctx = a.ctx
    fam = _unary_family(ctx.p, ctx.n, "neg")
    return WittVector(ctx, tuple(_evaluate(t, list(a.components), ctx.ring) for t in _compiled(fam)))


def witt_int_mul(k: int, a: WittVector) -> WittVector:
    """``k * a`` by double-and-add in the Witt group."""
    if k < 0:
        return witt_int_mul(-k, witt_neg(a))
    result, addend = a.ctx.zero, a
    while k:
        if k & 1:
            result = witt_add(result, addend)
        k >>= 1
        if k:
            addend = witt_add(addend, addend)
    return result


def teichmuller(ctx: WittContext, a) -> WittVector:
    return WittVector(ctx, (ctx.ring(a),) + (ctx.ring.zero,) * (ctx.n - 1))


def ghost_components(x: WittVector) -> list:
    p, ring = x.ctx.p, x.ctx.ring
    return [sum((p ** j * x[j] ** (p ** (i - j)) for j in range(i + 1)), ring.zero)
            for i in range(x.ctx.n)]


def frobenius(x: WittVector) -> WittVector:
    """Frobenius. Same length over rings of characteristic p (componentwise
    p-th power); otherwise the integral Frobenius polynomials, W_n -> W_(n-1)."""
    ctx = x.ctx
    if ctx.ring.characteristic == ctx.p:
        return WittVector(ctx, tuple(c ** ctx.p for c in x.components))
    if ctx.n < 2:
        raise UnsupportedRing("Frobenius of a length-1 vector outside characteristic p has length 0")
    fam = _unary_family(ctx.p, ctx.n, "frob")
    out = ctx.with_length(ctx.n - 1)
    return WittVector(out, tuple(_evaluate(t, list(x.components), ctx.ring) for t in _compiled(fam)))


def verschiebung(x: WittVector) -> WittVector:
    """``V(x_0, ..., x_(m-1)) = (0, x_0, ..., x_(m-1))``, a vector one longer."""
    ctx = x.ctx.with_length(x.ctx.n + 1)
    return WittVector(ctx, (ctx.ring.zero,) + x.components)


def truncate(x: WittVector, n: int) -> WittVector:
    if n > x.ctx.n:
        raise ValueError("cannot lengthen a Witt vector by truncation")
    return WittVector(x.ctx.with_length(n), x.components[:n])


# fixed points and kernels ----------------------------------------------

def _require_finite_char_p(ctx: WittContext):
    if not ctx.ring.is_finite:
        raise RingNotFinite(f"{ctx.ring} is not finite; enumeration impossible")
    if ctx.ring.characteristic != ctx.p:
        raise UnsupportedRing(f"{ctx.ring} does not have characteristic {ctx.p}")


def _element_index(ring):
    elems = ring.elements()
    return elems, {e: i for i, e in enumerate(elems)}


def _enumerate(ctx, component_ok, full_check):
    elems, index = _element_index(ctx.ring)
    choices = [[a for a in elems if component_ok(i, a)] for i in range(ctx.n)]
    found = []
    for comps in itertools.product(*choices):
        x = WittVector(ctx, comps)
        if full_check(x):
            found.append(x)
    found.sort(key=lambda v: tuple(index[c] for c in v.components))
    return found


def fix_points(ctx: WittContext) -> list:
    """All x in W_n(R) with F(x) = x, for a finite ring R of characteristic p."""
    _require_finite_char_p(ctx)
    p = ctx.p
    return _enumerate(ctx, lambda i, a: a ** p == a, lambda x: frobenius(x) == x)


def scalar_action(ctx: WittContext, c, x: WittVector, scalar: str = "teichmuller") -> WittVector:
    """``c . x``: Witt product with [c] (default) or componentwise scaling."""
    if scalar == "teichmuller":
        return witt_mul(teichmuller(ctx, c), x)
    if scalar == "componentwise":
        return WittVector(ctx, tuple(ctx.ring(c) * a for a in x.components))
    raise ValueError(f"unknown scalar convention {scalar!r}")


def sekiguchi_suwa_kernel(ctx: WittContext, t, scalar: str = "teichmuller") -> list:
    """All x in W_n(R) with F(x) = t^(p-1) . x."""
    _require_finite_char_p(ctx)
    p = ctx.p
    c = ctx.ring(t) ** (p - 1)
    if scalar == "teichmuller":
        # [c](x_0, x_1, ...) = (c x_0, c^p x_1, c^(p^2) x_2, ...)
        def ok(i, a):
            return a ** p == c ** (p ** i) * a
    elif scalar == "componentwise":
        def ok(i, a):
            return a ** p == c * a
    else:
        raise ValueError(f"unknown scalar convention {scalar!r}")
    return _enumerate(ctx, ok, lambda x: frobenius(x) == scalar_action(ctx, c, x, scalar))


def is_subgroup(vectors: list) -> bool:
    members = set(vectors)
    if not vectors or vectors[0].ctx.zero not in members:
        return False
    for a in vectors:
        if witt_neg(a) not in members:
            return False
        for b in vectors:
            if witt_add(a, b) not in members:
                return False
    return True


def additive_order(x: WittVector, limit: int = 10 ** 6) -> int:
    acc, k = x, 1
    while not acc.is_zero():
        acc = witt_add(acc, x)
        k += 1
        if k > limit:
            raise ValueError("order exceeds limit")
    return k
