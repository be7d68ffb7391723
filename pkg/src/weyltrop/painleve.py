"""Affine cases: the extended A-type group, q-Painleve dynamics, the frozen-node
D-type construction, translation indexing and degree growth."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    LaurentPoly,
    Monomial,
    RationalExpression,
    UniFrac,
    clearing_denominator,
    evaluate_univariate,
    random_rational,
    substitute,
    var,
)
from .birational import (
    Frame,
    ParamSystem,
    act_params,
    apply_word,
    f_name,
    generator_images,
    tau_name,
    x_name,
)
from .errors import (
    DegenerateSpecialization,
    NonIntegralSolution,
    PoleAtPoint,
    UnknownGenerator,
)
from .lattice import (
    CurveClass,
    DivisorClass,
    E,
    RootIndex,
    ShapeConfig,
    apply_word_lattice,
    cartan_entry,
    coroot,
    h_,
    invariant_classes,
    pairing,
    reflect,
    reflect_in,
)

EXTRA = ("pi", "iota", "r0", "r1")


# ---------------------------------------------------------------------------
# A type: parameters


@dataclass(frozen=True)
class AffineConfigA:
    """``k = l = (1, ..., 1)`` with parameters ``a_1..a_{N-1}, b_0, b_1``.

    ``a_N`` is not free: ``prod a_n = (b_0 b_1)^N`` makes it the monomial
    ``(b_0 b_1)^N / (a_1 ... a_{N-1})``, and ``q = b_0 b_1``.
    """

    N: int

    @property
    def cfg(self) -> ShapeConfig:
        return ShapeConfig.A(self.N)

    @property
    def generators(self) -> tuple:
        return tuple(RootIndex(n, 0) for n in range(1, self.N + 1)) + EXTRA

    @property
    def base(self) -> tuple:
        return tuple(f"a{n}" for n in range(1, self.N)) + ("b0", "b1")

    def initial(self) -> AState:
        return AState(self, {p: Monomial.of(p) for p in self.base})

    def param_images(self, g) -> dict:
        st = self.initial()
        return {p: m for p, m in st.act_generator(g).values.items() if m != Monomial.of(p)}

    def q(self) -> Monomial:
        return Monomial({"b0": 1, "b1": 1})


class AState:
    """Parameter values of the extended A-type group."""

    __slots__ = ("system", "values")

    def __init__(self, system: AffineConfigA, values: dict):
        self.system = system
        self.values = values

    @property
    def cfg(self) -> ShapeConfig:
        return self.system.cfg

    @property
    def N(self) -> int:
        return self.system.N

    def an(self, n: int) -> Monomial:
        N = self.N
        n = (n - 1) % N + 1
        if n < N:
            return self.values[f"a{n}"]
        out = (self.values["b0"] * self.values["b1"]) ** N
        for m in range(1, N):
            out = out / self.values[f"a{m}"]
        return out

    def b(self, i: int) -> Monomial:
        return self.values[f"b{i}"]

    def q(self) -> Monomial:
        return self.b(0) * self.b(1)

    def a0(self, n: int) -> Monomial:
        return self.an(n) ** 2

    def u(self, n: int, i: int = 1) -> Monomial:
        return self.an(n) * self.b(1) / self.b(0)

    def v(self, n: int, j: int = 1) -> Monomial:
        return self.an(n) * self.b(0) / self.b(1)

    def omega(self, n: int) -> Fraction:
        return Fraction(1, 2)

    def act_generator(self, g) -> AState:
        N = self.N
        vals = dict(self.values)
        if isinstance(g, tuple):
            n = (g[0] - 1) % N + 1
            if g[1] != 0:
                raise UnknownGenerator(f"{g} is not a generator of the A-type group")
            an = self.an(n)
            for m in range(1, N):
                c = cartan_entry(self.cfg, (n, 0), (m, 0))
                if c:
                    vals[f"a{m}"] = self.values[f"a{m}"] * an ** (-c)
        elif g == "pi":
            for m in range(1, N):
                vals[f"a{m}"] = self.an(m + 1)
        elif g == "iota":
            vals["b0"], vals["b1"] = self.b(1), self.b(0)
        elif g == "r1":
            vals["b1"] = self.b(1).inverse()
            vals["b0"] = self.b(1) ** 2 * self.b(0)
        elif g == "r0":
            vals["b0"] = self.b(0).inverse()
            vals["b1"] = self.b(0) ** 2 * self.b(1)
        else:
            raise UnknownGenerator(f"unknown generator {g!r}")
        return AState(self.system, vals)

    def param_images(self, g) -> dict:
        return self.system.param_images(g)

    # frame images of the extra generators; None defers to the generic code
    def images(self, g, frame: Frame, omega_form: bool = False):
        if isinstance(g, tuple):
            return None
        return extended_images(self, g, frame)

    def __eq__(self, other):
        return isinstance(other, AState) and self.values == other.values

    def __repr__(self):
        return "AState(" + ", ".join(f"{k}->{v}" for k, v in sorted(self.values.items())) + ")"


def _mono(m: Monomial) -> LaurentPoly:
    return LaurentPoly.monomial(m)


def g_poly(state: AState, n: int) -> RationalExpression:
    """``g_n(f) = (1 + sum_j prod_{i<=j} u_{n+i}/f_{n+i}) prod_k u_{n+k}^(-1+k/N)``."""
    N = state.N
    pref = Monomial()
    for k in range(1, N):
        pref = pref * state.u(n + k) ** Fraction(k - N, N)
    # clear the f denominators: multiply by prod_{i=1}^{N-1} f_{n+i}
    num = LaurentPoly.zero()
    for j in range(0, N):
        t = LaurentPoly.one()
        for i in range(1, j + 1):
            t = t * _mono(state.u(n + i))
        for i in range(j + 1, N):
            t = t * var(f_name((n + i - 1) % N + 1))
        num = num + t
    den = LaurentPoly.one()
    for i in range(1, N):
        den = den * var(f_name((n + i - 1) % N + 1))
    return RationalExpression(_mono(pref) * num, den)


def G_poly(state: AState, n: int, frame: Frame) -> LaurentPoly:
    """``G_n`` in polynomial form over the zeta monomials of ``frame``."""
    N = state.N
    pref = Monomial()
    for k in range(1, N):
        pref = pref * state.u(n + k) ** Fraction(k - N, N)
    out = LaurentPoly.zero()
    for j in range(0, N):
        t = LaurentPoly.one()
        for i in range(1, j + 1):
            t = t * _mono(state.u(n + i)) * frame.zeta_inf(n + i)
        for i in range(j + 1, N):
            t = t * frame.zeta0(n + i)
        out = out + t
    return _mono(pref) * out


def extended_images(state: AState, g, frame: Frame) -> dict:
    N = state.N

    def nn(n):
        return (n - 1) % N + 1

    if g == "r0":
        return apply_word(state, frame, ("iota", "r1", "iota"))[1]
    if frame.kind == "f":
        if g == "pi":
            return {f_name(n): RationalExpression(var(f_name(nn(n + 1)))) for n in range(1, N + 1)}
        if g == "iota":
            return {f_name(n): RationalExpression(LaurentPoly.one(), var(f_name(n))) for n in range(1, N + 1)}
        if g == "r1":
            return {
                f_name(n): g_poly(state, n + 1) / (RationalExpression(var(f_name(nn(n + 1)))) * g_poly(state, n - 1))
                for n in range(1, N + 1)
            }
    if frame.kind == "x":
        if g == "pi":
            return {x_name(n): RationalExpression(var(x_name(nn(n + 1)))) for n in range(1, N + 1)}
        if g == "iota":
            return {x_name(n): RationalExpression(LaurentPoly.one(), var(x_name(n))) for n in range(1, N + 1)}
    if frame.kind == "tau":
        if g == "pi":
            return {
                tau_name(n, s): RationalExpression(var(tau_name(nn(n + 1), s)))
                for n in range(1, N + 1)
                for s in (1, -1)
            }
        if g == "iota":
            return {tau_name(n, s): RationalExpression(var(tau_name(n, -s))) for n in range(1, N + 1) for s in (1, -1)}
        if g == "r1":
            out = {}
            for n in range(1, N + 1):
                den = LaurentPoly.one()
                for j in range(1, N + 1):
                    den = den * var(tau_name(j, 1))
                for k in range(1, N + 1):
                    if k not in (nn(n - 1), n, nn(n + 1)):
                        den = den * var(tau_name(k, -1))
                out[tau_name(n, 1)] = RationalExpression(G_poly(state, n, frame), den)
            return out
    raise UnknownGenerator(f"{g!r} has no action in the {frame.kind} frame")


def act_extended_A(state: AState, g, tauExprs: dict) -> dict:
    fr = Frame(state.cfg, "tau")
    imgs = generator_images(state, g, fr)
    out = dict(tauExprs)
    for k, v in imgs.items():
        out[k] = substitute(v, tauExprs)
    return out


def act_extended_A_f(state: AState, g, fExprs: dict) -> dict:
    fr = Frame(state.cfg, "f")
    imgs = generator_images(state, g, fr)
    out = dict(fExprs)
    for k, v in imgs.items():
        out[k] = substitute(v, fExprs)
    return out


QPA_WORD = ("r1", "iota")


def qpA_step(state: AState, fExprs: dict | None = None):
    """One step of the q-Painleve map; returns ``(new state, new f map)``."""
    return apply_word(state, Frame(state.cfg, "f"), QPA_WORD, fExprs)


# ---------------------------------------------------------------------------
# A type: lattice action of the extra generators


def _perm_vec(v, mapping_h, mapping_e):
    cfg = v.cfg
    h = {mapping_h(n): v.h(n) for n in range(1, cfg.N + 1)}
    e = {mapping_e(lab): x for lab, x in v.eCoeffs.items()}
    return type(v).build(cfg, h, e)


def gamma_pairs(cfg: ShapeConfig) -> list:
    """The mutually orthogonal pairs defining ``r_1``."""
    delta = invariant_classes(cfg)[0]
    out = []
    for n in range(1, cfg.N + 1):
        g = delta - E(cfg, n, 0 + 1) + E(cfg, n - 1, -1) + E(cfg, n, -1) + E(cfg, n + 1, -1)
        g = g - DivisorClass.build(cfg, h={n: 1})
        gc = h_(cfg, n) - CurveClass.build(cfg, e={(n, 1): 1})
        out.append((g, gc))
    return out


def lattice_act_A(cfg: ShapeConfig, g, v):
    """Action of ``pi``, ``iota``, ``r1``, ``r0`` (and inverses ``pi^-1``) on classes."""
    if isinstance(g, tuple):
        return reflect(cfg, g, v)
    if g == "pi":
        return _perm_vec(v, lambda n: n + 1, lambda lab: (lab[0] + 1, lab[1]))
    if g == "pi^-1":
        return _perm_vec(v, lambda n: n - 1, lambda lab: (lab[0] - 1, lab[1]))
    if g == "iota":
        return _perm_vec(v, lambda n: n, lambda lab: (lab[0], -lab[1]))
    if g == "r1":
        for a, ac in gamma_pairs(cfg):
            v = reflect_in(v, a, ac)
        return v
    if g == "r0":
        return lattice_act_A(cfg, "iota", lattice_act_A(cfg, "r1", lattice_act_A(cfg, "iota", v)))
    raise UnknownGenerator(f"unknown generator {g!r}")


def inverse_word_A(word) -> tuple:
    out = []
    for g in reversed(tuple(word)):
        out.append({"pi": "pi^-1", "pi^-1": "pi"}.get(g, g) if isinstance(g, str) else g)
    return tuple(out)


def translations_A(cfgA: AffineConfigA):
    """``T_n = pi s_{n+N-2} ... s_{n+1} s_n`` for n = 1..N and ``T~ = r_1 iota``."""
    N = cfgA.N
    Ts = []
    for n in range(1, N + 1):
        w = ["pi"] + [RootIndex((m - 1) % N + 1, 0) for m in range(n + N - 2, n - 1, -1)]
        Ts.append(tuple(w))
    return Ts, QPA_WORD


@dataclass(frozen=True)
class NuKappa:
    nu: tuple
    kappa: int

    def __post_init__(self):
        nu = tuple(int(x) for x in self.nu)
        object.__setattr__(self, "nu", tuple(x - nu[-1] for x in nu))


def nu_kappa_of(cfgA: AffineConfigA, L: DivisorClass) -> NuKappa:
    cfg = cfgA.cfg
    N = cfg.N
    p = [pairing(L, coroot(cfg, (i, 0))) for i in range(1, N + 1)]
    if sum(p) != 1:
        raise NonIntegralSolution("pairing equations are inconsistent for this class")
    nu = [0] * N
    for i in range(N - 2, -1, -1):
        nu[i] = nu[i + 1] + p[i]
    beta0c = CurveClass.build(cfg, h={n: 1 for n in range(1, N + 1)}, e={(n, -1): -1 for n in range(1, N + 1)})
    return NuKappa(tuple(nu), pairing(L, beta0c))


def divisor_of(cfgA: AffineConfigA, nk: NuKappa) -> DivisorClass:
    """Inverse of :func:`nu_kappa_of` built from translations of ``E_N^1``."""
    cfg = cfgA.cfg
    Ts, Tt = translations_A(cfgA)
    act = lambda g, v: lattice_act_A(cfg, g, v)  # noqa: E731
    L = E(cfg, cfgA.N, 1)
    for n, k in enumerate(nk.nu, start=1):
        w = Ts[n - 1] if k >= 0 else inverse_word_A(Ts[n - 1])
        for _ in range(abs(k)):
            L = apply_word_lattice(cfg, w, L, act)
    w = Tt if nk.kappa >= 0 else inverse_word_A(Tt)
    for _ in range(abs(nk.kappa)):
        L = apply_word_lattice(cfg, w, L, act)
    return L


# ---------------------------------------------------------------------------
# D type


@dataclass(frozen=True)
class AffineConfigD:
    """Frozen-node D-type system over the shape ``k = l = (2,1,...,1,2,1)``.

    ``labels`` maps the diagram label ``j`` (0..N+2, without ``N``'s generic
    vertex) to the generic root it acts through.
    """

    N: int
    system: ParamSystem
    labels: dict
    frozen: frozenset

    @property
    def cfg(self) -> ShapeConfig:
        return self.system.cfg

    def generator(self, j: int) -> RootIndex:
        return self.labels[j]

    def frame(self, kind: str, marked: bool = False) -> Frame:
        return Frame(self.cfg, kind, marked, self.frozen if kind == "tau" else frozenset())


def build_D(N: int):
    """Return ``(AffineConfigD, generators s_0..s_{N+2})``.

    Each generic root variable is the square of a D-type one; the vertex
    ``(N, 0)`` is removed and ``tau_N^{+-1}`` are frozen to 1.
    """
    cfg = ShapeConfig.D(N)
    labels = {0: RootIndex(1, 1), N + 2: RootIndex(1, -1), N: RootIndex(N - 1, 1), N + 1: RootIndex(N - 1, -1)}
    for n in range(1, N):
        labels[n] = RootIndex(n, 0)
    base = tuple((f"a{j}", r) for j, r in sorted(labels.items()))
    embed = {r: (f"a{j}", Fraction(2)) for j, r in labels.items()}
    gens = tuple(labels[j] for j in sorted(labels))
    system = ParamSystem(cfg, base, embed, gens)
    D = AffineConfigD(N, system, labels, frozenset({(N, 1), (N, -1)}))
    return D, gens


def conserved_quantities_D(N: int) -> list:
    if N % 2:
        p = LaurentPoly.one()
        for n in range(1, N + 1):
            p = p * var(f_name(n))
        return [RationalExpression(p)]
    ev, od = LaurentPoly.one(), LaurentPoly.one()
    for n in range(1, N // 2 + 1):
        ev = ev * var(f_name(2 * n))
        od = od * var(f_name(2 * n - 1))
    return [RationalExpression(ev), RationalExpression(od)]


def d_null_pair(D: AffineConfigD):
    from .lattice import null_pair

    return null_pair(D.cfg, exclude=((D.N, 0),))


# ---------------------------------------------------------------------------
# degree growth


@dataclass
class DegreeRow:
    n: int
    degrees: tuple
    bounds: tuple


def _image_denominator(state, word, frame) -> int:
    D = 1
    st = state
    for g in word:
        for img in generator_images(st, g, frame).values():
            D = _lcm(D, clearing_denominator(img))
        st = act_params(st, g)
    return D


def _lcm(a, b):
    from math import gcd

    return a * b // gcd(a, b)


# degrees over Z/p agree with degrees over Q away from finitely many primes
PRIME = 2**61 - 1


def iterate_univariate(state, word, n_iters: int, free: str, rng: random.Random, frame: Frame | None = None,
                       mod: int | None = PRIME):
    """Iterate ``word`` on the f-frame along a random line through ``free``.

    All other variables and every base parameter are set to random positive
    rationals; returns the list of f-value maps (``UniFrac``) for n = 0..n_iters.
    ``mod=None`` keeps exact rational coefficients (slow for long runs).
    """
    frame = frame or Frame(state.cfg, "f")
    names = frame.variables
    values = {v: (UniFrac.variable(mod) if v == free else UniFrac(random_rational(rng), mod=mod)) for v in names}
    base = sorted(state.values)
    D = _image_denominator(state, tuple(word) * 2, frame)
    roots = {p: random_rational(rng) for p in base}
    out = [dict(values)]
    st = state
    for _ in range(n_iters):
        for g in word:
            imgs = generator_images(st, g, frame)
            new = dict(values)
            for name, img in imgs.items():
                new[name] = evaluate_univariate(img, D, roots, values, mod)
            values = new
            st = act_params(st, g)
        out.append(dict(values))
    return out


def lattice_degree_bounds(cfg, word, n_iters: int, target: int, free: int, act=None):
    """``<T^n(H_target), h_free>`` for n = 0..n_iters, with T the lattice action of ``word``."""
    L = DivisorClass.build(cfg, h={target: 1})
    hj = h_(cfg, free)
    out = [pairing(L, hj)]
    for _ in range(n_iters):
        L = apply_word_lattice(cfg, word, L, act)
        out.append(pairing(L, hj))
    return out


def degree_growth_table(state, word, n_iters: int, free: str = "f1", trials: int = 3, seed: int = 0,
                        lattice_word=None, act=None, mod: int | None = PRIME) -> list:
    """Degrees of each ``T^n(f_i)`` in ``free`` with the lattice bounds.

    ``lattice_word`` is the word whose lattice action bounds the degrees; by
    default ``word`` itself, since ``w . f_i`` has the degree of ``w(H_i)``.
    """
    if n_iters < 2:
        raise ValueError("n_iters must be >= 2")
    cfg = state.cfg
    rng = random.Random(seed)
    best = None
    good = 0
    for _ in range(trials * 4):
        try:
            seq = iterate_univariate(state, word, n_iters, free, rng, mod=mod)
        except PoleAtPoint:
            continue
        degs = [tuple(vals[f_name(i)].degree() for i in range(1, cfg.N + 1)) for vals in seq]
        best = degs if best is None else [tuple(map(max, a, b)) for a, b in zip(best, degs)]
        good += 1
        if good >= trials:
            break
    if best is None:
        raise DegenerateSpecialization("every trial hit a pole")
    j = int(free[1:])
    lw = lattice_word if lattice_word is not None else tuple(word)
    bounds = [lattice_degree_bounds(cfg, lw, n_iters, i, j, act) for i in range(1, cfg.N + 1)]
    return [DegreeRow(n, best[n], tuple(b[n] for b in bounds)) for n in range(n_iters + 1)]


def second_differences(seq) -> list:
    return [seq[i + 2] - 2 * seq[i + 1] + seq[i] for i in range(len(seq) - 2)]
