"""Tau functions on the Weyl orbit of the exceptional classes.

Values are produced by applying words to seed variables.  A breadth-first
engine memoizes ``tau(g . L) = g . tau(L)`` and certifies Laurent-ness by exact
division at every step.

Theta-weighted defining polynomials are recovered in a *marked* tau frame in
which every ``s_n^0`` image carries fixed markers ``rho_n^0`` and
``rho_n^inf`` on its two monomials.  The marker exponents of a term are its
zeta-exponents, which removes the ambiguity of lifting a tau monomial back to
zeta coordinates (the zeta monomials are not independent in the tau frame).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    LaurentPoly,
    Monomial,
    RationalExpression,
    expr_equals,
    substitute,
    var,
)
from .birational import (
    Frame,
    apply_word,
    f_images,
    f_name,
    generator_images,
    rho_name,
    tau_name,
    zeta_name,
)
from .errors import NonMonomialCoefficient, NotZetaExpressible
from .lattice import DivisorClass, E, ShapeConfig, reflect


@dataclass(frozen=True)
class OrbitElement:
    divisor: DivisorClass
    witness: tuple
    base: tuple

    def __repr__(self):
        w = " ".join(str(g) for g in self.witness) or "()"
        return f"OrbitElement({self.divisor}; {w} . E{self.base[0]}^{self.base[1]})"


@dataclass
class TauValue:
    expr: RationalExpression
    element: OrbitElement


@dataclass
class NormalizedPolynomial:
    """``poly`` is a polynomial in the zeta variables; ``degree`` and ``mu`` come from the lattice."""

    poly: LaurentPoly
    degree: tuple
    mu: dict
    cfg: ShapeConfig = field(repr=False, default=None)

    def terms(self):
        """Yield ``(m, A_m)`` with ``m`` a dict ``(n, '0'|'inf') -> exponent``."""
        cfg = self.cfg
        for ve, pe, c in self.poly.iter_terms():
            m = {}
            for n in range(1, cfg.N + 1):
                for w in ("0", "inf"):
                    m[(n, w)] = ve.get(zeta_name(n, w), 0)
            yield m, Monomial(pe, c)

    def zeta_degrees(self) -> set:
        out = set()
        for m, _ in self.terms():
            out.add(tuple(m[(n, "0")] + m[(n, "inf")] for n in range(1, self.cfg.N + 1)))
        return out


def multiplicities(divisor: DivisorClass) -> dict:
    return {lab: -x for lab, x in divisor.eCoeffs.items()}


def seeds(cfg: ShapeConfig) -> list:
    return [OrbitElement(E(cfg, n, i), (), (n, i)) for n, i in cfg.eindex]


# ---------------------------------------------------------------------------
# the engine


class TauEngine:
    """Memoized tau values over a parameter system.

    ``lattice_act(g, v)`` and ``extra_images(g)`` extend the generator alphabet
    beyond simple reflections (used for the extended affine group).
    """

    def __init__(self, system, frozen=frozenset(), marked: bool = True, generators=None,
                 lattice_act=None, extra_images=None):
        self.system = system
        self.cfg = system.cfg
        self.frozen = frozenset(frozen)
        self.frame = Frame(self.cfg, "tau", marked, self.frozen)
        self.state0 = system.initial()
        self.generators = tuple(system.generators if generators is None else generators)
        self.lattice_act = lattice_act
        self.extra_images = extra_images
        self._img = {}
        self.table: dict = {}
        self.failures: list = []
        for el in seeds(self.cfg):
            lab = el.base
            val = LaurentPoly.one() if lab in self.frozen else var(tau_name(*lab))
            self.table[el.divisor] = (el, val)

    def images(self, g):
        got = self._img.get(g)
        if got is None:
            if self.extra_images is not None and not isinstance(g, tuple):
                got = self.extra_images(g, self.frame)
            else:
                got = (generator_images(self.state0, g, self.frame), self.system.param_images(g))
            self._img[g] = got
        return got

    def lattice(self, g, v):
        if isinstance(g, tuple):
            return reflect(self.cfg, g, v)
        return self.lattice_act(g, v)

    def step(self, g, value):
        """``g . value``: substitute the images of ``g`` and move the parameters."""
        vimg, pimg = self.images(g)
        e = substitute(RationalExpression.coerce(value), vimg, pimg)
        q = e.to_laurent()
        return (q, True) if q is not None else (e, False)

    def run(self, max_len: int) -> list:
        """Breadth-first sweep; returns the orbit elements found (shortest witnesses)."""
        frontier = [el for el, _ in self.table.values()]
        for _ in range(max_len):
            nxt = []
            for el in frontier:
                _, val = self.table[el.divisor]
                for g in self.generators:
                    d = self.lattice(g, el.divisor)
                    if d in self.table:
                        continue
                    new_el = OrbitElement(d, (g,) + el.witness, el.base)
                    res, ok = self.step(g, val)
                    if not ok:
                        self.failures.append(new_el)
                    self.table[d] = (new_el, res)
                    nxt.append(new_el)
            frontier = nxt
        return [el for el, _ in self.table.values()]

    def value(self, divisor):
        return self.table[divisor][1]

    def element(self, divisor) -> OrbitElement:
        return self.table[divisor][0]

    def ensure(self, el: OrbitElement):
        """Compute (and memoize) the value along ``el``'s witness."""
        if el.divisor in self.table:
            return self.table[el.divisor][1]
        lab = el.base
        val = LaurentPoly.one() if lab in self.frozen else var(tau_name(*lab))
        d = E(self.cfg, *lab)
        for k in range(len(el.witness) - 1, -1, -1):
            g = el.witness[k]
            d2 = self.lattice(g, d)
            if d2 in self.table:
                val = self.table[d2][1]
            else:
                val, ok = self.step(g, val)
                self.table[d2] = (OrbitElement(d2, el.witness[k:], lab), val)
                if not ok:
                    self.failures.append(self.table[d2][0])
            d = d2
        return val

    def plain(self, value):
        """Set every marker to 1."""
        if not self.frame.marked:
            return value
        ones = {}
        for n in range(1, self.cfg.N + 1):
            ones[rho_name(n, "0")] = 1
            ones[rho_name(n, "inf")] = 1
        return substitute(RationalExpression.coerce(value), ones).to_laurent()


def enumerate_orbit(cfg: ShapeConfig, max_len: int, generators=None, lattice_act=None) -> list:
    """All classes reachable from the seeds by words of length <= ``max_len``."""
    gens = tuple(cfg.roots if generators is None else generators)
    table = {el.divisor: el for el in seeds(cfg)}
    frontier = list(table.values())
    for _ in range(max_len):
        nxt = []
        for el in frontier:
            for g in gens:
                d = reflect(cfg, g, el.divisor) if isinstance(g, tuple) else lattice_act(g, el.divisor)
                if d not in table:
                    table[d] = OrbitElement(d, (g,) + el.witness, el.base)
                    nxt.append(table[d])
        frontier = nxt
    return list(table.values())


# ---------------------------------------------------------------------------
# spec-level operations


def tau_of(state, el: OrbitElement, frozen=frozenset(), marked: bool = False) -> TauValue:
    """Apply the witness word to the seed variable in the tau frame."""
    frame = Frame(state.cfg, "tau", marked, frozenset(frozen))
    name = tau_name(*el.base)
    if el.base in frame.frozen:
        return TauValue(RationalExpression(LaurentPoly.one()), el)
    _, exprs = apply_word(state, frame, el.witness)
    return TauValue(exprs[name], el)


def laurent_certificate(tv) -> tuple:
    expr = tv.expr if isinstance(tv, TauValue) else RationalExpression.coerce(tv)
    q = expr.to_laurent()
    return (q is not None, q)


def _zeta_vectors(cfg, frozen):
    """Tau exponent dicts of each zeta monomial."""
    fr = Frame(cfg, "tau", frozen=frozenset(frozen))
    out = {}
    for n in range(1, cfg.N + 1):
        for w, p in (("0", fr.zeta0(n)), ("inf", fr.zeta_inf(n))):
            ((ve, _, _),) = list(p.iter_terms()) if p.terms else [({}, {}, 1)]
            out[(n, w)] = ve
    return out


def phi_from_laurent(cfg, laurent: LaurentPoly, divisor: DivisorClass, frozen=frozenset()) -> NormalizedPolynomial:
    """Multiply by the multiplicity monomial and read off zeta exponents from markers."""
    mu = multiplicities(divisor)
    prod = LaurentPoly.coerce(laurent)
    for (n, i), x in mu.items():
        if x and (n, i) not in frozen:
            prod = prod * LaurentPoly.var(tau_name(n, i), x)
    zv = _zeta_vectors(cfg, frozen)
    out = LaurentPoly.zero()
    for ve, pe, c in prod.iter_terms():
        m = {}
        rest = dict(ve)
        for n in range(1, cfg.N + 1):
            for w in ("0", "inf"):
                m[(n, w)] = rest.pop(rho_name(n, w), 0)
        expect: dict = {}
        for key, e in m.items():
            if e < 0:
                raise NotZetaExpressible(f"negative zeta exponent in {key}")
            for t, x in zv[key].items():
                expect[t] = expect.get(t, 0) + e * x
        expect = {t: x for t, x in expect.items() if x}
        if expect != rest:
            raise NotZetaExpressible("tau monomial does not match its zeta exponents")
        zexp = {zeta_name(n, w): e for (n, w), e in m.items() if e}
        out = out + LaurentPoly.monomial(Monomial(pe, c), zexp)
    return NormalizedPolynomial(out, divisor.hCoeffs, mu, cfg)


def lift_unmarked(cfg, poly: LaurentPoly, degree, frozen=frozenset()) -> LaurentPoly:
    """Rewrite a tau polynomial in zeta monomials of multidegree ``degree``.

    Each term must match exactly one candidate exponent pattern.
    """
    zv = _zeta_vectors(cfg, frozen)
    cands = []
    for split in itertools.product(*[range(d + 1) for d in degree]):
        m = {}
        for n, (d, a) in enumerate(zip(degree, split), start=1):
            m[(n, "0")] = a
            m[(n, "inf")] = d - a
        tv: dict = {}
        for key, e in m.items():
            for t, x in zv[key].items():
                tv[t] = tv.get(t, 0) + e * x
        cands.append((m, {t: x for t, x in tv.items() if x}))
    out = LaurentPoly.zero()
    for ve, pe, c in poly.iter_terms():
        hits = [m for m, tv in cands if tv == ve]
        if len(hits) != 1:
            raise NotZetaExpressible(f"{len(hits)} zeta patterns match a term")
        zexp = {zeta_name(n, w): e for (n, w), e in hits[0].items() if e}
        out = out + LaurentPoly.monomial(Monomial(pe, c), zexp)
    return out


def phi_from_tau(engine: TauEngine, el: OrbitElement) -> NormalizedPolynomial:
    val = engine.ensure(el)
    q = RationalExpression.coerce(val).to_laurent()
    if q is None:
        raise NotZetaExpressible("tau value is not Laurent")
    return phi_from_laurent(engine.cfg, q, el.divisor, engine.frozen)


def check_normalization(np: NormalizedPolynomial, cfg=None) -> bool:
    """Theta-weighted sum of coefficient exponent vectors vanishes.

    ``Phi`` is read as a sum of monic monomial terms with repetition: a term
    with integer coefficient ``c`` counts ``c`` times.  A coefficient that is
    not a positive integer cannot be written that way.
    """
    cfg = cfg or np.cfg
    total: dict = {}
    for m, A in np.terms():
        c = A.coeff
        if c <= 0 or c.denominator != 1:
            raise NonMonomialCoefficient(f"coefficient {c} is not a sum of monic monomials")
        w = Fraction(int(c))
        for n in range(1, cfg.N + 1):
            w /= Fraction(cfg.theta0(n)) ** m[(n, "0")] * Fraction(cfg.theta_inf(n)) ** m[(n, "inf")]
        for p, e in A.exps:
            total[p] = total.get(p, 0) + w * e
    return all(x == 0 for x in total.values())


def coefficient_monomials(np: NormalizedPolynomial) -> list:
    out = []
    for ve, d in np.poly.coefficients().items():
        if len(d.terms) != 1:
            raise NonMonomialCoefficient("a zeta coefficient is not a single monomial")
        out.append(d.monomial_of()[0])
    return out


def phi_to_f(np: NormalizedPolynomial) -> RationalExpression:
    """``phi(f) = Phi(zeta) * prod (zeta_n^inf)^(-d_n)`` with ``zeta^0 -> f``, ``zeta^inf -> 1``."""
    cfg = np.cfg
    b = {}
    for n in range(1, cfg.N + 1):
        b[zeta_name(n, "0")] = var(f_name(n))
        b[zeta_name(n, "inf")] = 1
    return substitute(RationalExpression(np.poly), b)


def check_claim_transform(engine: TauEngine, el: OrbitElement, g) -> bool:
    """Transformation rule of ``phi`` under ``s_n^0`` with its normalizing constant."""
    cfg = engine.cfg
    g = cfg.root_index(*g)
    n = g.n
    if g.i != 0:
        raise ValueError("the rule concerns s_n^0")
    st = engine.state0
    np0 = phi_from_tau(engine, el)
    d = el.divisor
    image = engine.lattice(g, d)
    el2 = engine.table[image][0] if image in engine.table else OrbitElement(image, (g,) + el.witness, el.base)
    np1 = phi_from_tau(engine, el2)
    phi0, phi1 = phi_to_f(np0), phi_to_f(np1)
    fimg = f_images(st, g, omega_form=True)
    lhs = substitute(phi0, fimg, engine.system.param_images(g))
    dm, dp = d.h(n - 1), d.h(n + 1)
    mum, mup = -d.e(n, -1), -d.e(n, 1)
    u, v, w = st.u(n), st.v(n), cfg.omega(n)
    c = (u ** (dm - mum) * v ** (-dp + mup)) ** w
    fn = var(f_name(n))
    rhs = RationalExpression(LaurentPoly.monomial(c)) * phi1
    rhs = rhs * RationalExpression(fn + LaurentPoly.monomial(u)) ** (-dm + mum)
    rhs = rhs * RationalExpression(fn + LaurentPoly.monomial(v.inverse())) ** (-dp + mup)
    return expr_equals(lhs, rhs)
