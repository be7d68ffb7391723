"""Exact arithmetic substrate.

Coefficients are ``gmpy2.mpq`` rationals.  A :class:`LaurentPoly` is a sparse
sum of terms ``c * x^e * a^r`` where ``x`` are dynamical variables with integer
exponents and ``a`` are parameters (root variables) with rational exponents.
Parameter exponents are stored as integers scaled by the ring's ``pden``.

Rational expressions are never reduced to lowest terms; equality is decided by
cross multiplication and Laurent-ness by exact division.
"""

from __future__ import annotations

import heapq
import math
import operator
import random
from fractions import Fraction
from functools import reduce

import flint
from gmpy2 import mpq

from .errors import (
    DegenerateSpecialization,
    DivisionByZero,
    NonClearedExponent,
    PoleAtPoint,
)

_add = operator.add
_sub = operator.sub
_ONE = mpq(1)


def Q(x) -> mpq:
    """Coerce ints, Fractions, strings and mpq to an exact ``mpq``."""
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = mpq(x)
    return Fraction(int(x.numerator), int(x.denominator))


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# parameter monomials


class Monomial:
    """A coefficient times a product of parameters with rational exponents.

    This is the ``CoeffMonomial`` of the design: zero exponents are dropped and
    two monomials are equal iff coefficient and exponent map agree.
    """

    __slots__ = ("coeff", "exps")

    def __init__(self, exps=None, coeff=1):
        items = {}
        for k, v in (exps or {}).items():
            v = _frac(v)
            if v:
                items[k] = v
        self.exps = tuple(sorted(items.items()))
        self.coeff = Q(coeff)

    @classmethod
    def of(cls, name: str, exp=1) -> Monomial:
        return cls({name: exp})

    def as_dict(self) -> dict:
        return dict(self.exps)

    def __getitem__(self, name) -> Fraction:
        return self.as_dict().get(name, Fraction(0))

    def __mul__(self, other):
        if not isinstance(other, Monomial):
            return Monomial(self.as_dict(), self.coeff * Q(other))
        d = self.as_dict()
        for k, v in other.exps:
            d[k] = d.get(k, 0) + v
        return Monomial(d, self.coeff * other.coeff)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Monomial):
            return self * (1 / Q(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def inverse(self) -> Monomial:
        return Monomial({k: -v for k, v in self.exps}, 1 / self.coeff)

    def __pow__(self, e):
        e = _frac(e)
        if e.denominator != 1 and self.coeff != 1:
            raise ValueError("fractional power of a non-monic monomial")
        c = self.coeff ** int(e) if e.denominator == 1 else _ONE
        return Monomial({k: v * e for k, v in self.exps}, c)

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.exps == other.exps and self.coeff == other.coeff

    def __hash__(self):
        return hash((self.exps, self.coeff))

    def is_one(self) -> bool:
        return not self.exps and self.coeff == 1

    def __repr__(self):
        parts = [] if self.coeff == 1 else [str(self.coeff)]
        for k, v in self.exps:
            parts.append(k if v == 1 else f"{k}^({v})" if v.denominator != 1 or v < 0 else f"{k}^{v}")
        return "*".join(parts) or "1"


CoeffMonomial = Monomial


# ---------------------------------------------------------------------------
# rings


class Ring:
    """Ordered variable and parameter universe; instances are interned."""

    _interned: dict = {}
    _embeds: dict = {}

    __slots__ = ("vars", "params", "pden", "nv", "vindex", "pindex", "width")

    def __new__(cls, vars=(), params=(), pden=1):
        key = (tuple(vars), tuple(params), int(pden))
        r = cls._interned.get(key)
        if r is None:
            r = object.__new__(cls)
            r.vars, r.params, r.pden = key
            r.nv = len(r.vars)
            r.vindex = {v: i for i, v in enumerate(r.vars)}
            r.pindex = {p: i for i, p in enumerate(r.params)}
            r.width = r.nv + len(r.params)
            cls._interned[key] = r
        return r

    def __repr__(self):
        return f"Ring(vars={self.vars}, params={self.params}, pden={self.pden})"

    def union(self, other: Ring) -> Ring:
        if other is self:
            return self
        vs = self.vars + tuple(v for v in other.vars if v not in self.vindex)
        ps = self.params + tuple(p for p in other.params if p not in self.pindex)
        return Ring(vs, ps, _lcm(self.pden, other.pden))

    def embedder(self, dst: Ring):
        """Return a function mapping keys of ``self`` to keys of ``dst``."""
        if dst is self:
            return None
        f = Ring._embeds.get((self, dst))
        if f is None:
            if dst.pden % self.pden:
                raise ValueError("target ring cannot hold source exponents")
            scale = dst.pden // self.pden
            pos = [dst.vindex[v] for v in self.vars]
            pos += [dst.nv + dst.pindex[p] for p in self.params]
            muls = [1] * self.nv + [scale] * len(self.params)
            width = dst.width
            spec = list(zip(pos, muls))

            def f(key, spec=spec, width=width):
                out = [0] * width
                for (p, m), e in zip(spec, key):
                    if e:
                        out[p] = e * m
                return tuple(out)

            Ring._embeds[(self, dst)] = f
        return f


EMPTY = Ring()


def _convert(poly: LaurentPoly, ring: Ring) -> dict:
    f = poly.ring.embedder(ring)
    if f is None:
        return poly.terms
    return {f(k): c for k, c in poly.terms.items()}


def _grlex(ring: Ring, key):
    return (sum(key[: ring.nv]),) + key


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Sparse Laurent polynomial with parameter-monomial coefficients.

    ``sf`` is the structural subtraction-free flag: it survives addition,
    multiplication and division and is cleared by subtraction or negation.
    """

    __slots__ = ("ring", "terms", "sf")

    def __init__(self, ring: Ring, terms: dict, sf: bool | None = None):
        self.ring = ring
        self.terms = terms
        if sf is None:
            sf = all(c > 0 for c in terms.values())
        self.sf = sf

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring = EMPTY) -> LaurentPoly:
        return cls(ring, {}, True)

    @classmethod
    def constant(cls, c, ring: Ring = EMPTY) -> LaurentPoly:
        c = Q(c)
        if not c:
            return cls(ring, {}, True)
        return cls(ring, {(0,) * ring.width: c}, c > 0)

    @classmethod
    def one(cls, ring: Ring = EMPTY) -> LaurentPoly:
        return cls.constant(1, ring)

    @classmethod
    def var(cls, name: str, exp: int = 1) -> LaurentPoly:
        return cls(Ring((name,)), {(int(exp),): _ONE}, True)

    @classmethod
    def monomial(cls, mono: Monomial, varexps: dict | None = None) -> LaurentPoly:
        """Single term: ``mono`` times a product of variable powers."""
        varexps = {k: int(v) for k, v in (varexps or {}).items() if v}
        pden = 1
        for _, e in mono.exps:
            pden = _lcm(pden, e.denominator)
        names = tuple(varexps)
        ring = Ring(names, tuple(k for k, _ in mono.exps), pden)
        key = tuple(varexps[v] for v in names) + tuple(int(e * pden) for _, e in mono.exps)
        if not mono.coeff:
            return cls(ring, {}, True)
        return cls(ring, {key: mono.coeff}, mono.coeff > 0)

    @classmethod
    def coerce(cls, x) -> LaurentPoly:
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, Monomial):
            return cls.monomial(x)
        return cls.constant(x)

    # -- structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        if len(self.terms) > 1:
            return False
        (k,) = self.terms
        return not any(k)

    def constant_value(self) -> mpq:
        if not self.terms:
            return mpq(0)
        if not self.is_constant():
            raise ValueError("not a constant")
        return next(iter(self.terms.values()))

    def __len__(self):
        return len(self.terms)

    def variables(self) -> set:
        used = set()
        for k in self.terms:
            for i in range(self.ring.nv):
                if k[i]:
                    used.add(self.ring.vars[i])
        return used

    def parameters(self) -> set:
        used = set()
        nv = self.ring.nv
        for k in self.terms:
            for j, p in enumerate(self.ring.params):
                if k[nv + j]:
                    used.add(p)
        return used

    def iter_terms(self):
        """Yield ``(varexps, paramexps, coeff)`` with plain dicts."""
        r = self.ring
        for k, c in self.terms.items():
            ve = {r.vars[i]: k[i] for i in range(r.nv) if k[i]}
            pe = {r.params[j]: Fraction(k[r.nv + j], r.pden) for j in range(len(r.params)) if k[r.nv + j]}
            yield ve, pe, c

    def exponent_range(self, name: str) -> tuple[int, int]:
        i = self.ring.vindex.get(name)
        if i is None or not self.terms:
            return (0, 0)
        es = [k[i] for k in self.terms]
        return (min(es), max(es))

    def coefficients(self) -> dict:
        """Group by variable exponents: ``{varexp tuple: CoeffElement}``.

        The coefficient elements are parameter-only Laurent polynomials.
        """
        r = self.ring
        pr = Ring((), r.params, r.pden)
        out: dict = {}
        for k, c in self.terms.items():
            out.setdefault(k[: r.nv], {})[k[r.nv :]] = c
        return {ve: LaurentPoly(pr, d) for ve, d in out.items()}

    def monomial_of(self) -> tuple[Monomial, dict]:
        """Split a single-term polynomial into (parameter monomial, varexps)."""
        if len(self.terms) != 1:
            raise ValueError("not a monomial")
        ((ve, pe, c),) = list(self.iter_terms())
        return Monomial(pe, c), ve

    # -- arithmetic ----------------------------------------------------------
    def _pair(self, other):
        if self.ring is other.ring:
            return self.ring, self.terms, other.terms
        ring = self.ring.union(other.ring)
        return ring, _convert(self, ring), _convert(other, ring)

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, RationalExpression):
                return NotImplemented
            other = LaurentPoly.coerce(other)
        ring, a, b = self._pair(other)
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return LaurentPoly(ring, out, self.sf and other.sf)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {k: -c for k, c in self.terms.items()}, False)

    def __sub__(self, other):
        if isinstance(other, RationalExpression):
            return NotImplemented
        r = self + (-LaurentPoly.coerce(other))
        r.sf = False
        return r

    def __rsub__(self, other):
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, RationalExpression):
                return NotImplemented
            if isinstance(other, Monomial):
                other = LaurentPoly.monomial(other)
            else:
                c = Q(other)
                if not c:
                    return LaurentPoly(self.ring, {}, True)
                return LaurentPoly(self.ring, {k: v * c for k, v in self.terms.items()}, self.sf and c > 0)
        ring, a, b = self._pair(other)
        sf = self.sf and other.sf
        if not a or not b:
            return LaurentPoly(ring, {}, True)
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((kb, cb),) = b.items()
            return LaurentPoly(ring, {tuple(map(_add, ka, kb)): ca * cb for ka, ca in a.items()}, sf)
        out: dict = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = tuple(map(_add, ka, kb))
                v = get(k)
                out[k] = ca * cb if v is None else v + ca * cb
        return LaurentPoly(ring, {k: v for k, v in out.items() if v}, sf)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        e = int(e)
        if e < 0:
            return self.monomial_inverse() ** (-e)
        if e == 0:
            return LaurentPoly.one(self.ring)
        if len(self.terms) == 1:
            ((k, c),) = self.terms.items()
            return LaurentPoly(self.ring, {tuple(x * e for x in k): c**e}, self.sf)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def monomial_inverse(self) -> LaurentPoly:
        if len(self.terms) != 1:
            raise DivisionByZero("only monomials are units")
        ((k, c),) = self.terms.items()
        return LaurentPoly(self.ring, {tuple(-x for x in k): 1 / c}, self.sf)

    def __truediv__(self, other):
        return RationalExpression(self, LaurentPoly.coerce(other)) if not isinstance(other, RationalExpression) else RationalExpression(self) / other

    def __rtruediv__(self, other):
        return RationalExpression(LaurentPoly.coerce(other), self)

    def __eq__(self, other):
        if isinstance(other, RationalExpression):
            return other == self
        if not isinstance(other, LaurentPoly):
            try:
                other = LaurentPoly.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        _, a, b = self._pair(other)
        return a == b

    def __hash__(self):
        return hash(self.canonical())

    def canonical(self) -> frozenset:
        return frozenset(
            (tuple(sorted(ve.items())), tuple(sorted(pe.items())), c) for ve, pe, c in self.iter_terms()
        )

    def leading_key(self):
        return max(self.terms, key=lambda k: _grlex(self.ring, k))

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        r = self.ring
        parts = []
        for k in sorted(self.terms, key=lambda k: _grlex(r, k), reverse=True):
            c = self.terms[k]
            fs = []
            for i in range(r.nv):
                if k[i]:
                    fs.append(r.vars[i] if k[i] == 1 else f"{r.vars[i]}^{k[i]}")
            for j, p in enumerate(r.params):
                e = k[r.nv + j]
                if e:
                    f = Fraction(e, r.pden)
                    fs.append(p if f == 1 else f"{p}^({f})")
            if not fs:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(fs))
            elif c == -1:
                parts.append("-" + "*".join(fs))
            else:
                parts.append(f"{c}*" + "*".join(fs))
        return " + ".join(parts).replace("+ -", "- ")


CoeffElement = LaurentPoly


def var(name: str) -> LaurentPoly:
    return LaurentPoly.var(name)


def param(name: str, exp=1) -> LaurentPoly:
    return LaurentPoly.monomial(Monomial({name: exp}))


def poly_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    """Apply ``op`` in {"add", "sub", "mul"}; variable universes are unioned."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# exact division


def exact_divide(n: LaurentPoly, d: LaurentPoly) -> LaurentPoly | None:
    """Return ``q`` with ``q * d == n`` or ``None`` when no such Laurent ``q``.

    Division runs in a graded-lex group order.  Each quotient exponent is
    confined to the box ``[min n - min d, max n - max d]`` per coordinate,
    which bounds the loop when ``d`` does not divide ``n``.
    """
    n = LaurentPoly.coerce(n)
    d = LaurentPoly.coerce(d)
    if d.is_zero():
        raise DivisionByZero("exact_divide by zero")
    ring, nt, dt = n._pair(d)
    if not nt:
        return LaurentPoly(ring, {}, True)
    if len(dt) == 1:
        return LaurentPoly(ring, nt, n.sf) * LaurentPoly(ring, dt, d.sf).monomial_inverse()
    width = ring.width
    cols_n = list(zip(*nt))
    cols_d = list(zip(*dt))
    lo = [min(cols_n[i]) - min(cols_d[i]) for i in range(width)]
    hi = [max(cols_n[i]) - max(cols_d[i]) for i in range(width)]
    if any(l > h for l, h in zip(lo, hi)):
        return None
    nv = ring.nv

    def hkey(k):
        return (-sum(k[:nv]),) + tuple(-x for x in k)

    lt_d = max(dt, key=lambda k: _grlex(ring, k))
    lc_d = dt[lt_d]
    rem = dict(nt)
    heap = [hkey(k) for k in rem]
    heapq.heapify(heap)
    quot: dict = {}
    while rem:
        while True:
            h = heapq.heappop(heap)
            k = tuple(-x for x in h[1:])
            if k in rem:
                break
        qk = tuple(map(_sub, k, lt_d))
        for i in range(width):
            if not lo[i] <= qk[i] <= hi[i]:
                return None
        qc = rem[k] / lc_d
        quot[qk] = qc
        for kd, cd in dt.items():
            kk = tuple(map(_add, qk, kd))
            v = rem.get(kk)
            if v is None:
                rem[kk] = -qc * cd
                heapq.heappush(heap, hkey(kk))
            else:
                v = v - qc * cd
                if v:
                    rem[kk] = v
                else:
                    del rem[kk]
        # the leading key may have been re-inserted with a nonzero value
        if k in rem:
            heapq.heappush(heap, hkey(k))
    return LaurentPoly(ring, quot)


# ---------------------------------------------------------------------------
# rational expressions


class RationalExpression:
    """A fraction ``num / den`` of Laurent polynomials, never gcd-reduced.

    A monomial denominator is folded into the numerator, since monomials are
    units of the Laurent ring.  ``==`` is semantic equality (cross multiply).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = LaurentPoly.coerce(num)
        den = LaurentPoly.one() if den is None else LaurentPoly.coerce(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if len(den.terms) == 1 and not den.is_constant() or den.is_constant() and den.constant_value() != 1:
            sf = num.sf and den.sf
            num = num * den.monomial_inverse()
            num.sf = sf
            den = LaurentPoly.one()
        self.num = num
        self.den = den

    @classmethod
    def coerce(cls, x) -> RationalExpression:
        return x if isinstance(x, RationalExpression) else cls(x)

    @property
    def sf(self) -> bool:
        return self.num.sf and self.den.sf

    def is_laurent(self) -> bool:
        return self.den.is_constant()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        o = RationalExpression.coerce(other)
        if self.den == o.den:
            return RationalExpression(self.num + o.num, self.den)
        return RationalExpression(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalExpression(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalExpression.coerce(other))

    def __rsub__(self, other):
        return RationalExpression.coerce(other) - self

    def __mul__(self, other):
        o = RationalExpression.coerce(other)
        return RationalExpression(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalExpression.coerce(other)
        if o.num.is_zero():
            raise DivisionByZero("division by a zero expression")
        return RationalExpression(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalExpression.coerce(other) / self

    def __pow__(self, e: int):
        e = int(e)
        if e >= 0:
            return RationalExpression(self.num**e, self.den**e)
        if self.num.is_zero():
            raise DivisionByZero("negative power of zero")
        return RationalExpression(self.den ** (-e), self.num ** (-e))

    def __eq__(self, other):
        try:
            o = RationalExpression.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return expr_equals(self, o)

    __hash__ = None

    def to_laurent(self) -> LaurentPoly | None:
        if self.den.is_constant():
            return self.num
        return exact_divide(self.num, self.den)

    def __repr__(self):
        if self.den.is_constant():
            return f"RationalExpression({self.num})"
        return f"RationalExpression(({self.num}) / ({self.den}))"

    __str__ = __repr__


def expr_arith(a, b, op: str) -> RationalExpression:
    a = RationalExpression.coerce(a)
    b = RationalExpression.coerce(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def expr_equals(a, b) -> bool:
    """``a.num * b.den == b.num * a.den`` as Laurent polynomials."""
    a = RationalExpression.coerce(a)
    b = RationalExpression.coerce(b)
    if a.den == b.den:
        return a.num == b.num
    return a.num * b.den == b.num * a.den


# ---------------------------------------------------------------------------
# substitution


def _subst_params(p: LaurentPoly, pb: dict) -> LaurentPoly:
    """Replace parameters by monomials (a linear map on exponents)."""
    r = p.ring
    hit = [j for j, name in enumerate(r.params) if name in pb]
    if not hit or not p.terms:
        return p
    imgs = {j: pb[r.params[j]] for j in hit}
    dimg = 1
    for m in imgs.values():
        for _, e in m.exps:
            dimg = _lcm(dimg, e.denominator)
    keep = [j for j in range(len(r.params)) if j not in imgs]
    new_params = [r.params[j] for j in keep]
    for m in imgs.values():
        for name, _ in m.exps:
            if name not in new_params:
                new_params.append(name)
    pidx = {name: i for i, name in enumerate(new_params)}
    T = r.pden * dimg
    # image vectors in the scale T: exponent s/pden * (num/dimg) -> s * num
    img_vecs = {}
    for j, m in imgs.items():
        img_vecs[j] = [(pidx[name], int(e * dimg)) for name, e in m.exps]
    nv = r.nv
    out: dict = {}
    for k, c in p.terms.items():
        pe = [0] * len(new_params)
        for j in keep:
            pe[pidx[r.params[j]]] = k[nv + j] * dimg
        for j, vec in img_vecs.items():
            s = k[nv + j]
            if s:
                m = imgs[j]
                if m.coeff != 1:
                    if s % r.pden:
                        raise ValueError("fractional power of a non-monic parameter image")
                    c = c * m.coeff ** (s // r.pden)
                for idx, num in vec:
                    pe[idx] += s * num
        key = k[:nv] + tuple(pe)
        v = out.get(key)
        out[key] = c if v is None else v + c
    g = T
    for key in out:
        for x in key[nv:]:
            if x:
                g = math.gcd(g, x)
    if g > 1:
        out = {key[:nv] + tuple(x // g for x in key[nv:]): c for key, c in out.items()}
    ring = Ring(r.vars, tuple(new_params), T // g)
    return LaurentPoly(ring, {k: c for k, c in out.items() if c}, p.sf and all(m.coeff > 0 for m in imgs.values()))


class _Subst:
    """Variable bindings prepared for repeated use on numerator and denominator."""

    def __init__(self, bindings: dict, polys: list):
        self.bindings = {}
        ring = reduce(Ring.union, [q.ring for q in polys], EMPTY)
        for name, val in bindings.items():
            val = RationalExpression.coerce(val)
            self.bindings[name] = val
            ring = ring.union(val.num.ring).union(val.den.ring)
        self.ring = ring
        self.sf = all(v.sf for v in self.bindings.values())
        self.factors: dict = {}
        self.easy: dict = {}
        self.hard: list = []
        for name, val in self.bindings.items():
            A = LaurentPoly(ring, _convert(val.num, ring), val.num.sf)
            B = LaurentPoly(ring, _convert(val.den, ring), val.den.sf)
            i = ring.vindex[name] if name in ring.vindex else None
            if i is None:
                continue
            if A.is_zero():
                self.hard.append((i, name, A, B))
            elif len(A.terms) == 1 and len(B.terms) == 1:
                ((ka, ca),) = A.terms.items()
                ((kb, cb),) = B.terms.items()
                self.easy[i] = (tuple(map(_sub, ka, kb)), ca / cb)
            else:
                self.hard.append((i, name, A, B))
        self._pow: dict = {}

    def power(self, name, which, poly, e):
        key = (name, which, e)
        v = self._pow.get(key)
        if v is None:
            v = self._pow[key] = poly**e
        return v

    def apply(self, p: LaurentPoly):
        """Return ``(numerator, {factor: exponent})`` for ``p`` under the bindings."""
        ring = self.ring
        terms = _convert(p, ring)
        if not terms:
            return LaurentPoly(ring, {}, True), {}
        hard = self.hard
        ranges = []
        for i, name, A, B in hard:
            es = [k[i] for k in terms]
            lo, hi = min(es), max(es)
            a_mono = len(A.terms) == 1
            b_mono = len(B.terms) == 1
            L = 0 if a_mono else max(0, -lo)
            H = 0 if b_mono else max(0, hi)
            ranges.append((L, H, a_mono, b_mono))
        zero_idx = [i for i, *_ in hard] + list(self.easy)
        groups: dict = {}
        for k, c in terms.items():
            if zero_idx:
                base = list(k)
                for i in zero_idx:
                    base[i] = 0
                for i, (shift, cc) in self.easy.items():
                    e = k[i]
                    if e:
                        base = [x + e * s for x, s in zip(base, shift)]
                        c = c * cc**e
                base = tuple(base)
            else:
                base = k
            pat = tuple(k[i] for i, *_ in hard)
            g = groups.setdefault(pat, {})
            v = g.get(base)
            g[base] = c if v is None else v + c
        total = None
        for pat, g in groups.items():
            g = {k: c for k, c in g.items() if c}
            if not g:
                continue
            inner = LaurentPoly(ring, g, p.sf)
            for (i, name, A, B), e, (L, H, a_mono, b_mono) in zip(hard, pat, ranges):
                inner = inner * self.power(name, "A", A, e + L)
                inner = inner * self.power(name, "B", B, (-e if b_mono else H - e))
            total = inner if total is None else total + inner
        if total is None:
            total = LaurentPoly(ring, {}, True)
        total.sf = p.sf and self.sf
        den = {}
        for (i, name, A, B), (L, H, a_mono, b_mono) in zip(hard, ranges):
            if L:
                den[(name, "A")] = L
                self.factors[(name, "A")] = A
            if H:
                den[(name, "B")] = H
                self.factors[(name, "B")] = B
        return total, den


def substitute(e, bindings: dict, params: dict | None = None) -> RationalExpression:
    """Substitute variables by rational expressions and parameters by monomials.

    Unbound variables pass through.  Denominator factors introduced by the
    bindings are tracked symbolically so numerator and denominator share them.
    """
    e = RationalExpression.coerce(e)
    num, den = e.num, e.den
    if params:
        num = _subst_params(num, params)
        den = _subst_params(den, params)
    if not bindings:
        return RationalExpression(num, den)
    bindings = {k: v for k, v in bindings.items() if k in num.ring.vindex or k in den.ring.vindex}
    if not bindings:
        return RationalExpression(num, den)
    s = _Subst(bindings, [num, den])
    pn, fn = s.apply(num)
    pd, fd = s.apply(den)
    top, bot = pn, pd
    for key in set(fn) | set(fd):
        k = fd.get(key, 0) - fn.get(key, 0)
        if k > 0:
            top = top * s.power(key[0], key[1], s.factors[key], k)
        elif k < 0:
            bot = bot * s.power(key[0], key[1], s.factors[key], -k)
    if bot.is_zero():
        raise DivisionByZero("binding makes a denominator identically zero")
    return RationalExpression(top, bot)


# ---------------------------------------------------------------------------
# numeric specialization


def clearing_denominator(*exprs) -> int:
    """Least D such that every parameter exponent times D is an integer."""
    D = 1
    for e in exprs:
        e = RationalExpression.coerce(e)
        for p in (e.num, e.den):
            r = p.ring
            g = r.pden
            for k in p.terms:
                for x in k[r.nv :]:
                    if x:
                        g = math.gcd(g, x)
            D = _lcm(D, r.pden // g)
    return D


def _param_value(cache, roots, D, name, s, pden):
    key = (name, s, pden)
    v = cache.get(key)
    if v is None:
        num = D * s
        if num % pden:
            raise NonClearedExponent(f"D={D} does not clear exponent {Fraction(s, pden)} of {name}")
        root = roots[name]
        k = num // pden
        if k < 0 and not root:
            raise PoleAtPoint(f"parameter {name} is zero")
        v = cache[key] = root**k
    return v


def _eval_poly_exact(p: LaurentPoly, D, roots, values, cache) -> mpq:
    r = p.ring
    total = mpq(0)
    nv = r.nv
    for k, c in p.terms.items():
        t = c
        for i in range(nv):
            e = k[i]
            if e:
                x = values[r.vars[i]]
                if not x and e < 0:
                    raise PoleAtPoint(f"{r.vars[i]} = 0")
                t = t * x**e
        for j, name in enumerate(r.params):
            s = k[nv + j]
            if s:
                t = t * _param_value(cache, roots, D, name, s, r.pden)
        total += t
    return total


def specialize_numeric(e, D: int, param_values: dict, var_values: dict) -> mpq:
    """Exact value of ``e``; parameter ``p`` evaluates to ``param_values[p]**(D*exp)``."""
    e = RationalExpression.coerce(e)
    roots = {k: Q(v) for k, v in param_values.items()}
    values = {k: Q(v) for k, v in var_values.items()}
    cache: dict = {}
    n = _eval_poly_exact(e.num, D, roots, values, cache)
    d = _eval_poly_exact(e.den, D, roots, values, cache)
    if not d:
        raise PoleAtPoint("denominator vanishes at the point")
    return n / d


def evaluate_mp(e, param_values: dict, var_values: dict):
    """Evaluate at mpmath reals; parameter exponents are real powers."""
    import mpmath

    e = RationalExpression.coerce(e)

    def ev(p):
        r = p.ring
        total = mpmath.mpf(0)
        pw = {}
        for k, c in p.terms.items():
            t = mpmath.mpf(int(c.numerator)) / int(c.denominator)
            for i in range(r.nv):
                if k[i]:
                    t *= mpmath.power(var_values[r.vars[i]], k[i])
            for j, name in enumerate(r.params):
                s = k[r.nv + j]
                if s:
                    key = (name, s, r.pden)
                    if key not in pw:
                        pw[key] = mpmath.power(param_values[name], mpmath.mpf(s) / r.pden)
                    t *= pw[key]
            total += t
        return total

    d = ev(e.den)
    if d == 0:
        raise PoleAtPoint("denominator vanishes at the point")
    return ev(e.num) / d


# ---------------------------------------------------------------------------
# univariate rational functions (for degree measurement)


def _fq(x) -> flint.fmpq:
    x = Q(x)
    return flint.fmpq(int(x.numerator), int(x.denominator))


def _const_poly(c, mod):
    """Constant polynomial over Q (``mod`` None) or over Z/mod."""
    if mod is None:
        return flint.fmpq_poly([_fq(c)])
    c = Q(c)
    den = int(c.denominator) % mod
    if not den:
        raise PoleAtPoint("denominator vanishes modulo the prime")
    return flint.nmod_poly([int(c.numerator) * pow(den, -1, mod) % mod], mod)


class UniFrac:
    """Reduced univariate rational function ``num/den`` (coprime, den monic).

    Coefficients live in Q, or in Z/p when ``mod`` is a prime; the modular
    variant is used for fast degree measurement along random lines.
    """

    __slots__ = ("num", "den", "mod")

    def __init__(self, num, den=None, reduce=True, mod=None):
        if isinstance(num, flint.nmod_poly):
            mod = int(num.modulus())
        poly = flint.fmpq_poly if mod is None else flint.nmod_poly
        num = num if isinstance(num, poly) else _const_poly(num, mod)
        den = _const_poly(1, mod) if den is None else den if isinstance(den, poly) else _const_poly(den, mod)
        if den.is_zero():
            raise PoleAtPoint("zero denominator")
        if reduce:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num // g
                den = den // g
            lc = den[den.degree()]
            if lc != 1:
                if mod is None:
                    num = num / lc
                    den = den / lc
                else:
                    inv = pow(int(lc), -1, mod)
                    num = num * inv
                    den = den * inv
        self.num = num
        self.den = den
        self.mod = mod

    @classmethod
    def variable(cls, mod=None) -> UniFrac:
        if mod is None:
            return cls(flint.fmpq_poly([0, 1]))
        return cls(flint.nmod_poly([0, 1], mod))

    def degree(self) -> int:
        return max(self.num.degree(), self.den.degree(), 0)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __mul__(self, o):
        return UniFrac(self.num * o.num, self.den * o.den)

    def __add__(self, o):
        return UniFrac(self.num * o.den + o.num * self.den, self.den * o.den)

    def __truediv__(self, o):
        if o.num.is_zero():
            raise PoleAtPoint("division by zero function")
        return UniFrac(self.num * o.den, self.den * o.num)

    def __repr__(self):
        return f"UniFrac(({self.num}) / ({self.den}))"


def _eval_poly_uni(p: LaurentPoly, D, roots, values: dict, cache, mod=None):
    """Common-denominator evaluation of ``p`` at univariate fractions."""
    r = p.ring
    nv = r.nv
    used = [i for i in range(nv) if any(k[i] for k in p.terms)]
    lo = {i: min(0, min(k[i] for k in p.terms)) for i in used}
    hi = {i: max(0, max(k[i] for k in p.terms)) for i in used}
    powc: dict = {}

    def pw(i, which, e):
        key = (i, which, e)
        v = powc.get(key)
        if v is None:
            f = values[r.vars[i]]
            v = powc[key] = (f.num if which == 0 else f.den) ** e
        return v

    groups: dict = {}
    for k, c in p.terms.items():
        t = c
        for j, name in enumerate(r.params):
            s = k[nv + j]
            if s:
                t = t * _param_value(cache, roots, D, name, s, r.pden)
        pat = tuple(k[i] for i in used)
        groups[pat] = groups.get(pat, 0) + t
    num = _const_poly(0, mod)
    for pat, c in groups.items():
        if not c:
            continue
        term = _const_poly(c, mod)
        for i, e in zip(used, pat):
            term = term * pw(i, 0, e - lo[i]) * pw(i, 1, hi[i] - e)
        num = num + term
    den = _const_poly(1, mod)
    for i in used:
        den = den * pw(i, 0, -lo[i]) * pw(i, 1, hi[i])
    return num, den


def evaluate_univariate(e, D: int, param_values: dict, values: dict, mod=None) -> UniFrac:
    """Evaluate ``e`` with every variable bound to a :class:`UniFrac` (or a number).

    With ``mod`` set, parameter roots and numbers are reduced modulo that prime.
    """
    e = RationalExpression.coerce(e)
    roots = {k: Q(v) for k, v in param_values.items()}
    vals = {k: (v if isinstance(v, UniFrac) else UniFrac(v, mod=mod)) for k, v in values.items()}
    cache: dict = {}
    n1, d1 = _eval_poly_uni(e.num, D, roots, vals, cache, mod)
    n2, d2 = _eval_poly_uni(e.den, D, roots, vals, cache, mod)
    den = d1 * n2
    if den.is_zero():
        raise PoleAtPoint("denominator vanishes under specialization")
    return UniFrac(n1 * d2, den)


def random_rational(rng: random.Random, bound: int = 10**4) -> mpq:
    return mpq(rng.randint(1, bound), rng.randint(1, bound))


def reduced_degree_in(e, v: str, trials: int = 5, rng: random.Random | None = None) -> int:
    """Degree of ``e`` in ``v`` after specializing everything else at random.

    Returns the maximum over ``trials`` of ``max(deg num, deg den)`` of the
    reduced univariate fraction.
    """
    if trials < 3:
        raise ValueError("trials must be >= 3")
    rng = rng or random.Random(0)
    e = RationalExpression.coerce(e)
    D = clearing_denominator(e)
    names = (e.num.variables() | e.den.variables()) - {v}
    params = e.num.parameters() | e.den.parameters()
    best = None
    for _ in range(trials):
        values = {n: random_rational(rng) for n in sorted(names)}
        values[v] = UniFrac.variable()
        roots = {p: random_rational(rng) for p in sorted(params)}
        try:
            f = evaluate_univariate(e, D, roots, values)
        except PoleAtPoint:
            continue
        d = f.degree()
        best = d if best is None else max(best, d)
    if best is None:
        raise DegenerateSpecialization("every trial hit a pole")
    return best
