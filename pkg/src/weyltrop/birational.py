"""Subtraction-free birational actions of the Weyl group.

Three variable frames are supported: ``f`` (inhomogeneous coordinates), ``x``
(with ``f_n = x_{n+1}/x_{n-1}``) and ``tau``.  Root variables transform
multiplicatively through the Cartan matrix.

Words are threaded left to right: for ``w = (g_1, ..., g_m)`` each step replaces
every current expression by the image formula of the next generator, with
coefficients taken from the current parameter state.  The result is
``w . R(a, tau) = R(a . w, tau . w)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    LaurentPoly,
    Monomial,
    RationalExpression,
    Q,
    substitute,
    var,
)
from .errors import AssumptionViolated, NotSubtractionFree, UnknownGenerator
from .lattice import RootIndex, ShapeConfig, cartan_entry


# ---------------------------------------------------------------------------
# naming


def a_name(n: int, i: int) -> str:
    return f"a{n}.{i}"


def tau_name(n: int, i: int) -> str:
    return f"tau{n}.{i}"


def f_name(n: int) -> str:
    return f"f{n}"


def x_name(n: int) -> str:
    return f"x{n}"


def zeta_name(n: int, which: str) -> str:
    return f"zeta{n}.{which}"


def rho_name(n: int, which: str) -> str:
    return f"rho{n}.{which}"


# ---------------------------------------------------------------------------
# parameters


def uv_exponents(cfg: ShapeConfig, n: int):
    """Exponents of ``u_n`` and ``v_n`` over the root variables at vertex ``n``."""
    n = cfg.norm(n)
    k, l = cfg.kn(n), cfg.ln(n)
    wk, wl = Fraction(k, k + l), Fraction(l, k + l)
    u = {RootIndex(n, 0): wl}
    v = {RootIndex(n, 0): wk}
    for j in range(1, l):
        e = (1 - Fraction(j, l)) * wl
        u[RootIndex(n, -j)] = e
        v[RootIndex(n, -j)] = -e
    for i in range(1, k):
        e = (1 - Fraction(i, k)) * wk
        u[RootIndex(n, i)] = -e
        v[RootIndex(n, i)] = e
    return u, v


@dataclass(frozen=True)
class ParamSystem:
    """Base parameters attached to roots.

    ``base`` pairs each base parameter name with the root it multiplies along;
    ``embed`` writes each generic root variable ``a_n^i`` as ``name**power``
    (a root variable missing from ``embed`` is frozen to 1).  ``generators``
    lists the simple reflections that act.
    """

    cfg: ShapeConfig
    base: tuple
    embed: dict = field(compare=False, hash=False)
    generators: tuple = ()

    @classmethod
    def generic(cls, cfg: ShapeConfig) -> ParamSystem:
        base = tuple((a_name(*r), r) for r in cfg.roots)
        embed = {r: (a_name(*r), Fraction(1)) for r in cfg.roots}
        return cls(cfg, base, embed, cfg.roots)

    def name_of(self, r) -> str:
        for name, rr in self.base:
            if rr == r:
                return name
        raise UnknownGenerator(f"root {r} carries no parameter")

    def initial(self) -> ParamState:
        return ParamState(self, {name: Monomial.of(name) for name, _ in self.base})

    def param_images(self, g) -> dict:
        """Action of a simple reflection on the base parameters (monomial map)."""
        g = self.cfg.root_index(*g)
        if g not in self.generators:
            raise UnknownGenerator(f"{g} is not a generator here")
        gname = self.name_of(g)
        out = {}
        for name, r in self.base:
            c = cartan_entry(self.cfg, g, r)
            if c:
                out[name] = Monomial.of(name) * Monomial.of(gname, -c)
        return out


class ParamState:
    """Current values of the base parameters as monomials in the initial ones."""

    __slots__ = ("system", "values")

    def __init__(self, system, values: dict):
        self.system = system
        self.values = values

    @property
    def cfg(self) -> ShapeConfig:
        return self.system.cfg

    def a(self, r) -> Monomial:
        """Current value of the generic root variable ``a_r``."""
        r = RootIndex(self.cfg.norm(r[0]), r[1])
        spec = self.system.embed.get(r)
        if spec is None:
            return Monomial()
        name, p = spec
        return self.values[name] ** p

    def a0(self, n: int) -> Monomial:
        return self.a((n, 0))

    def _uv(self, n):
        eu, ev = uv_exponents(self.cfg, n)
        u = Monomial()
        v = Monomial()
        for r, e in eu.items():
            u = u * self.a(r) ** e
        for r, e in ev.items():
            v = v * self.a(r) ** e
        return u, v

    def u(self, n: int, i: int = 1) -> Monomial:
        u, _ = self._uv(n)
        for m in range(1, i):
            u = self.a((n, m)) * u
        return u

    def v(self, n: int, j: int = 1) -> Monomial:
        _, v = self._uv(n)
        for m in range(1, j):
            v = self.a((n, -m)) * v
        return v

    def omega(self, n: int) -> Fraction:
        return self.cfg.omega(n)

    def act(self, g) -> ParamState:
        return act_params(self, g)

    def __eq__(self, other):
        return isinstance(other, ParamState) and self.values == other.values

    def __repr__(self):
        return "ParamState(" + ", ".join(f"{k}->{v}" for k, v in sorted(self.values.items())) + ")"


def act_params(state: ParamState, g) -> ParamState:
    """Right action of a generator on parameter values."""
    if hasattr(state, "act_generator"):
        return state.act_generator(g)
    imgs = state.system.param_images(g)
    vals = dict(state.values)
    for name, mono in imgs.items():
        out = Monomial()
        for p, e in mono.exps:
            out = out * state.values[p] ** e
        vals[name] = out * mono.coeff
    return ParamState(state.system, vals)


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class Frame:
    """A choice of dynamical variables.

    ``kind`` is one of ``"f"``, ``"x"``, ``"tau"``.  In the tau frame ``marked``
    multiplies the two monomials of each ``s_n^0`` image by fixed markers
    ``rho_n^0`` and ``rho_n^inf`` and ``frozen`` lists labels ``(n, i)`` whose
    tau variable is set to 1.
    """

    cfg: ShapeConfig
    kind: str
    marked: bool = False
    frozen: frozenset = frozenset()

    @property
    def variables(self) -> list:
        cfg = self.cfg
        if self.kind == "f":
            return [f_name(n) for n in range(1, cfg.N + 1)]
        if self.kind == "x":
            return [x_name(n) for n in range(1, cfg.N + 1)]
        if self.kind == "tau":
            return [tau_name(*lab) for lab in cfg.eindex if lab not in self.frozen]
        raise ValueError(f"unknown frame {self.kind!r}")

    def identity(self) -> dict:
        return {v: RationalExpression(var(v)) for v in self.variables}

    def tau(self, n, i) -> LaurentPoly:
        n = self.cfg.norm(n)
        if (n, i) in self.frozen:
            return LaurentPoly.one()
        return var(tau_name(n, i))

    def xi(self, n) -> LaurentPoly:
        out = LaurentPoly.one()
        for i in range(1, self.cfg.kn(n) + 1):
            out = out * self.tau(n, i)
        return out

    def eta(self, n) -> LaurentPoly:
        out = LaurentPoly.one()
        for j in range(1, self.cfg.ln(n) + 1):
            out = out * self.tau(n, -j)
        return out

    def zeta0(self, n) -> LaurentPoly:
        return self.xi(n + 1) * self.eta(n - 1)

    def zeta_inf(self, n) -> LaurentPoly:
        return self.xi(n - 1) * self.eta(n + 1)


F_FRAME, X_FRAME, TAU_FRAME = "f", "x", "tau"


def _m(mono: Monomial) -> LaurentPoly:
    return LaurentPoly.monomial(mono)


def _require_assumption(cfg, n):
    if not cfg.assumption_holds(n):
        raise AssumptionViolated(
            f"k[n-1]*k[n+1] != l[n-1]*l[n+1] at n={cfg.norm(n)} for {cfg.label()}"
        )


def f_images(state, g, omega_form: bool = False) -> dict:
    """Images of the ``f`` variables changed by a simple reflection."""
    cfg = state.cfg
    n, i = g
    if i != 0:
        return {}
    n = cfg.norm(n)
    u, v = state.u(n), state.v(n)
    fn = var(f_name(n))
    fm, fp = var(f_name(cfg.norm(n - 1))), var(f_name(cfg.norm(n + 1)))
    if omega_form:
        _require_assumption(cfg, n)
        w = cfg.omega(n)
        top = _m(v**w) * fn + _m(v ** (w - 1))
        bot = _m(u ** (-w)) * fn + _m(u ** (1 - w))
        return {
            f_name(cfg.norm(n - 1)): RationalExpression(fm * top, bot),
            f_name(cfg.norm(n + 1)): RationalExpression(fp * bot, top),
        }
    a0 = state.a0(n)
    cm = a0 ** Fraction(cfg.ln(n - 1), cfg.kn(n - 1) + cfg.ln(n - 1))
    cp = a0 ** Fraction(-cfg.kn(n + 1), cfg.kn(n + 1) + cfg.ln(n + 1))
    p_u = fn + _m(u)
    p_v = fn + _m(v.inverse())
    return {
        f_name(cfg.norm(n - 1)): RationalExpression(_m(cm) * fm * p_v, p_u),
        f_name(cfg.norm(n + 1)): RationalExpression(_m(cp) * fp * p_u, p_v),
    }


def x_images(state, g) -> dict:
    cfg = state.cfg
    n, i = g
    if i != 0:
        return {}
    n = cfg.norm(n)
    _require_assumption(cfg, n)
    u, v, w = state.u(n), state.v(n), cfg.omega(n)
    xn, xp, xm = var(x_name(n)), var(x_name(cfg.norm(n + 1))), var(x_name(cfg.norm(n - 1)))
    top = _m(v**w) * xp + _m(v ** (w - 1)) * xm
    bot = _m(u ** (-w)) * xp + _m(u ** (1 - w)) * xm
    return {x_name(n): RationalExpression(xn * top, bot)}


def tau_images(state, g, frame: Frame) -> dict:
    cfg = state.cfg
    n, i = g
    n = cfg.norm(n)
    if i > 0:
        a, b = (n, i), (n, i + 1)
    elif i < 0:
        a, b = (n, i), (n, i - 1)
    else:
        _require_assumption(cfg, n)
        u, v, w = state.u(n), state.v(n), cfg.omega(n)
        z0, zi = frame.zeta0(n), frame.zeta_inf(n)
        if frame.marked:
            z0 = z0 * var(rho_name(n, "0"))
            zi = zi * var(rho_name(n, "inf"))
        out = {}
        if (n, 1) not in frame.frozen:
            out[tau_name(n, 1)] = RationalExpression(_m(v**w) * z0 + _m(v ** (w - 1)) * zi, frame.tau(n, -1))
        if (n, -1) not in frame.frozen:
            out[tau_name(n, -1)] = RationalExpression(_m(u ** (-w)) * z0 + _m(u ** (1 - w)) * zi, frame.tau(n, 1))
        return out
    out = {}
    if a not in frame.frozen:
        out[tau_name(*a)] = RationalExpression(frame.tau(*b))
    if b not in frame.frozen:
        out[tau_name(*b)] = RationalExpression(frame.tau(*a))
    return out


def generator_images(state, g, frame: Frame, omega_form: bool = False) -> dict:
    """Changed variables of ``frame`` under ``g`` (coefficients from ``state``)."""
    if hasattr(state, "images"):
        out = state.images(g, frame, omega_form)
        if out is not None:
            return out
    if not isinstance(g, tuple):
        raise UnknownGenerator(f"generator {g!r} has no action in this frame")
    g = state.cfg.root_index(*g)
    if frame.kind == "f":
        return f_images(state, g, omega_form)
    if frame.kind == "x":
        return x_images(state, g)
    if frame.kind == "tau":
        return tau_images(state, g, frame)
    raise ValueError(frame.kind)


def act(state, g, exprs: dict, frame: Frame, omega_form: bool = False) -> dict:
    """Apply one generator to a map of frame expressions (coefficients from ``state``)."""
    imgs = generator_images(state, g, frame, omega_form)
    out = dict(exprs)
    for name, img in imgs.items():
        out[name] = substitute(img, exprs)
    return out


def act_f(state, g, fExprs: dict) -> dict:
    return act(state, g, fExprs, Frame(state.cfg, "f"))


def act_f_omega(state, g, fExprs: dict) -> dict:
    return act(state, g, fExprs, Frame(state.cfg, "f"), omega_form=True)


def act_x(state, g, xExprs: dict) -> dict:
    return act(state, g, xExprs, Frame(state.cfg, "x"))


def act_tau(state, g, tauExprs: dict, marked: bool = False, frozen=frozenset()) -> dict:
    return act(state, g, tauExprs, Frame(state.cfg, "tau", marked, frozenset(frozen)))


def apply_word(state, frame: Frame, word, exprs: dict | None = None, omega_form: bool = False):
    """Thread ``state`` through ``word`` while composing the frame maps.

    Returns ``(state . w, {variable: w . variable})``.
    """
    exprs = frame.identity() if exprs is None else dict(exprs)
    for g in word:
        exprs = act(state, g, exprs, frame, omega_form)
        state = act_params(state, g)
    return state, exprs


def frame_maps(cfg: ShapeConfig, frozen=frozenset()):
    """Binding maps ``(tauToF, tauToX, xToF, tauToZeta)`` for :func:`substitute`."""
    fr = Frame(cfg, "tau", frozen=frozenset(frozen))
    N = cfg.N
    tau_to_f = {f_name(n): RationalExpression(fr.zeta0(n), fr.zeta_inf(n)) for n in range(1, N + 1)}
    tau_to_x = {x_name(n): RationalExpression(fr.xi(n), fr.eta(n)) for n in range(1, N + 1)}
    x_to_f = {
        f_name(n): RationalExpression(var(x_name(cfg.norm(n + 1))), var(x_name(cfg.norm(n - 1))))
        for n in range(1, N + 1)
    }
    tau_to_zeta = {}
    for n in range(1, N + 1):
        tau_to_zeta[zeta_name(n, "0")] = RationalExpression(fr.zeta0(n))
        tau_to_zeta[zeta_name(n, "inf")] = RationalExpression(fr.zeta_inf(n))
    return tau_to_f, tau_to_x, x_to_f, tau_to_zeta


# ---------------------------------------------------------------------------
# min-plus shadow


def _trop_poly(p: LaurentPoly, point: dict):
    r = p.ring
    best = None
    for k, c in p.terms.items():
        val = Fraction(0)
        for idx in range(r.nv):
            if k[idx]:
                val += k[idx] * point[r.vars[idx]]
        for j, name in enumerate(r.params):
            s = k[r.nv + j]
            if s:
                val += Fraction(s, r.pden) * point[name]
        if best is None or val < best:
            best = val
    if best is None:
        raise NotSubtractionFree("the zero polynomial has no min-plus value")
    return best


def _trop_terms(p: LaurentPoly) -> tuple:
    r = p.ring
    names = list(r.vars) + list(r.params)
    scale = [Fraction(1)] * r.nv + [Fraction(1, r.pden)] * len(r.params)
    out = []
    for k in p.terms:
        out.append(tuple((names[j], k[j] * scale[j]) for j in range(len(names)) if k[j]))
    if not out:
        raise NotSubtractionFree("the zero polynomial has no min-plus value")
    return tuple(out)


def _trop_min(terms, point) -> Fraction:
    return min(sum((w * point[n] for n, w in t), Fraction(0)) for t in terms)


class TropicalMap:
    """Min-plus shadow of one generator, compiled once and reusable on many points."""

    def __init__(self, system_state, g, frame: Frame, omega_form: bool = False):
        self.images = {}
        for name, img in generator_images(system_state, g, frame, omega_form).items():
            img = RationalExpression.coerce(img)
            if not img.sf:
                raise NotSubtractionFree(f"image of {name} was built with subtraction")
            self.images[name] = (_trop_terms(img.num), _trop_terms(img.den))
        self.params = {name: tuple((p, Fraction(e)) for p, e in mono.exps)
                       for name, mono in param_images_of(system_state, g).items()}

    def __call__(self, point: dict) -> dict:
        out = dict(point)
        for name, (num, den) in self.images.items():
            out[name] = _trop_min(num, point) - _trop_min(den, point)
        for name, mono in self.params.items():
            out[name] = sum((e * point[p] for p, e in mono), Fraction(0))
        return out


def ultradiscrete_eval(e, point: dict) -> Fraction:
    """Min-plus value: products become sums, quotients differences, sums minima."""
    e = RationalExpression.coerce(e)
    if not e.sf:
        raise NotSubtractionFree("expression was built with subtraction or a negative constant")
    point = {k: Fraction(v) if not isinstance(v, Fraction) else v for k, v in point.items()}
    return _trop_poly(e.num, point) - _trop_poly(e.den, point)


def tropical_step(system_state, g, frame: Frame, point: dict, omega_form: bool = False) -> dict:
    """Push a point (variables and base parameters) through the min-plus map of ``g``.

    Images use the initial parameter state; base parameters move by the
    tropicalized monomial action.
    """
    point = {k: Fraction(v) for k, v in point.items()}
    return TropicalMap(system_state, g, frame, omega_form)(point)


def param_images_of(state, g) -> dict:
    if hasattr(state, "param_images"):
        return state.param_images(g)
    return state.system.param_images(g)


def random_point(names, rng: random.Random, lo=-20, hi=20) -> dict:
    return {n: Fraction(rng.randint(lo * 10, hi * 10), 10) for n in names}


__all__ = [
    "ParamSystem",
    "ParamState",
    "Frame",
    "act_params",
    "TropicalMap",
    "act",
    "act_f",
    "act_f_omega",
    "act_x",
    "act_tau",
    "apply_word",
    "frame_maps",
    "generator_images",
    "ultradiscrete_eval",
    "tropical_step",
    "uv_exponents",
    "a_name",
    "tau_name",
    "f_name",
    "x_name",
    "zeta_name",
    "rho_name",
    "Q",
]
