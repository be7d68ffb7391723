"""The Neron-Severi bilattice of the blown-up product of projective lines.

Divisor classes live over the basis ``H_n, E_n^i`` and curve classes over
``h_n, e_n^i``.  Indices ``n`` are 1-based and taken modulo ``N``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from .errors import (
    BadShape,
    HalfIntegerResult,
    IndexOutOfRange,
    NotAffine,
    ShapeMismatch,
    UnknownGenerator,
)


@dataclass(frozen=True)
class ShapeConfig:
    """Shape data ``(k, l)``; all index arithmetic is cyclic mod ``N``."""

    N: int
    k: tuple
    l: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))
        if self.N < 3:
            raise BadShape("N must be at least 3")
        if len(self.k) != self.N or len(self.l) != self.N:
            raise BadShape(f"k and l must have length N={self.N}")
        if min(self.k + self.l) < 1:
            raise BadShape("k and l entries must be positive")

    # -- presets ------------------------------------------------------------
    @classmethod
    def A(cls, N: int) -> ShapeConfig:
        return cls(N, (1,) * N, (1,) * N, name=f"a{N - 1}")

    @classmethod
    def D(cls, N: int) -> ShapeConfig:
        if N < 3:
            raise BadShape("the D shape needs N >= 3")
        k = (2,) + (1,) * (N - 3) + (2, 1)
        return cls(N, k, k, name=f"d{N}")

    @classmethod
    def preset(cls, text: str) -> ShapeConfig:
        m = re.fullmatch(r"([ad])(\d+)", text.strip().lower())
        if not m:
            raise BadShape(f"unknown preset {text!r}; use aR or dN")
        n = int(m.group(2))
        return cls.A(n + 1) if m.group(1) == "a" else cls.D(n)

    # -- indices ------------------------------------------------------------
    def norm(self, n: int) -> int:
        return (n - 1) % self.N + 1

    def kn(self, n: int) -> int:
        return self.k[self.norm(n) - 1]

    def ln(self, n: int) -> int:
        return self.l[self.norm(n) - 1]

    @cached_property
    def eindex(self) -> tuple:
        """Ordered exceptional labels ``(n, i)``: ``1..k_n`` then ``-1..-l_n``."""
        out = []
        for n in range(1, self.N + 1):
            out += [(n, i) for i in range(1, self.kn(n) + 1)]
            out += [(n, -j) for j in range(1, self.ln(n) + 1)]
        return tuple(out)

    @cached_property
    def epos(self) -> dict:
        return {lab: self.N + p for p, lab in enumerate(self.eindex)}

    @property
    def width(self) -> int:
        return self.N + len(self.eindex)

    def has_exceptional(self, n: int, i: int) -> bool:
        return (n, i) in self.epos

    # -- theta, omega -------------------------------------------------------
    def theta0(self, n: int) -> int:
        return self.kn(n + 1) + self.ln(n - 1)

    def theta_inf(self, n: int) -> int:
        return self.kn(n - 1) + self.ln(n + 1)

    def omega(self, n: int) -> Fraction:
        t0 = self.theta0(n)
        return Fraction(t0, t0 + self.theta_inf(n))

    def assumption_holds(self, n: int) -> bool:
        return self.kn(n - 1) * self.kn(n + 1) == self.ln(n - 1) * self.ln(n + 1)

    # -- roots --------------------------------------------------------------
    @cached_property
    def roots(self) -> tuple:
        out = []
        for n in range(1, self.N + 1):
            out.append(RootIndex(n, 0))
            out += [RootIndex(n, i) for i in range(1, self.kn(n))]
            out += [RootIndex(n, -j) for j in range(1, self.ln(n))]
        return tuple(out)

    def root_index(self, n: int, i: int) -> RootIndex:
        n = self.norm(n)
        if not -self.ln(n) + 1 <= i <= self.kn(n) - 1:
            raise IndexOutOfRange(f"no root ({n},{i}) for this shape")
        return RootIndex(n, i)

    def label(self) -> str:
        return self.name or f"N={self.N},k={list(self.k)},l={list(self.l)}"


class RootIndex(NamedTuple):
    n: int
    i: int

    def __str__(self):
        return f"s{self.n}.{self.i}"


# ---------------------------------------------------------------------------
# classes


class _Vec:
    __slots__ = ("cfg", "c")
    kind = ""

    def __init__(self, cfg: ShapeConfig, coeffs):
        self.cfg = cfg
        self.c = tuple(int(x) for x in coeffs)
        if len(self.c) != cfg.width:
            raise ShapeMismatch("coefficient vector has the wrong length")

    @classmethod
    def zero(cls, cfg):
        return cls(cfg, (0,) * cfg.width)

    @classmethod
    def build(cls, cfg, h=None, e=None):
        """``h``: map n -> coeff; ``e``: map (n, i) -> coeff."""
        v = [0] * cfg.width
        for n, x in (h or {}).items():
            v[cfg.norm(n) - 1] += x
        for (n, i), x in (e or {}).items():
            key = (cfg.norm(n), i)
            if key not in cfg.epos:
                raise IndexOutOfRange(f"no exceptional class {key}")
            v[cfg.epos[key]] += x
        return cls(cfg, v)

    @property
    def hCoeffs(self) -> tuple:
        return self.c[: self.cfg.N]

    @property
    def eCoeffs(self) -> dict:
        return {lab: self.c[p] for lab, p in self.cfg.epos.items() if self.c[p]}

    def h(self, n: int) -> int:
        return self.c[self.cfg.norm(n) - 1]

    def e(self, n: int, i: int) -> int:
        p = self.cfg.epos.get((self.cfg.norm(n), i))
        return 0 if p is None else self.c[p]

    def _check(self, other):
        if type(other) is not type(self):
            raise ShapeMismatch(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.cfg != self.cfg:
            raise ShapeMismatch("classes belong to different shapes")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.cfg, [a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.cfg, [a - b for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return type(self)(self.cfg, [-a for a in self.c])

    def __mul__(self, k: int):
        return type(self)(self.cfg, [a * k for a in self.c])

    __rmul__ = __mul__

    def __eq__(self, other):
        return type(other) is type(self) and other.cfg == self.cfg and other.c == self.c

    def __hash__(self):
        return hash((type(self).__name__, self.cfg, self.c))

    def is_zero(self) -> bool:
        return not any(self.c)

    def __repr__(self):
        big, small = ("H", "E") if self.kind == "divisor" else ("h", "e")
        parts = []
        for n in range(1, self.cfg.N + 1):
            x = self.h(n)
            if x:
                parts.append((x, f"{big}{n}"))
        for (n, i), x in self.eCoeffs.items():
            parts.append((x, f"{small}{n}^{i}"))
        if not parts:
            return "0"
        s = ""
        for x, name in parts:
            sign = "-" if x < 0 else "+"
            mag = "" if abs(x) == 1 else f"{abs(x)}"
            s += f" {sign} {mag}{name}"
        s = s.strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


class DivisorClass(_Vec):
    kind = "divisor"


class CurveClass(_Vec):
    kind = "curve"


def H(cfg, n) -> DivisorClass:
    return DivisorClass.build(cfg, h={n: 1})


def E(cfg, n, i) -> DivisorClass:
    return DivisorClass.build(cfg, e={(n, i): 1})


def h_(cfg, n) -> CurveClass:
    return CurveClass.build(cfg, h={n: 1})


def e_(cfg, n, i) -> CurveClass:
    return CurveClass.build(cfg, e={(n, i): 1})


def divisor_basis(cfg) -> list:
    return [DivisorClass(cfg, [int(p == q) for q in range(cfg.width)]) for p in range(cfg.width)]


def curve_basis(cfg) -> list:
    return [CurveClass(cfg, [int(p == q) for q in range(cfg.width)]) for p in range(cfg.width)]


def pairing(D: DivisorClass, C: CurveClass) -> int:
    if not isinstance(D, DivisorClass) or not isinstance(C, CurveClass):
        raise ShapeMismatch("pairing takes a divisor class and a curve class")
    if D.cfg != C.cfg:
        raise ShapeMismatch("classes belong to different shapes")
    N = D.cfg.N
    a, b = D.c, C.c
    s = 0
    for p in range(N):
        s += a[p] * b[p]
    for p in range(N, len(a)):
        s -= a[p] * b[p]
    return s


# ---------------------------------------------------------------------------
# roots and reflections


def _idx(cfg, idx) -> RootIndex:
    n, i = idx
    return cfg.root_index(n, i)


def root(cfg, idx) -> DivisorClass:
    n, i = _idx(cfg, idx)
    if i == 0:
        return DivisorClass.build(cfg, h={n: 1}, e={(n, 1): -1, (n, -1): -1})
    if i > 0:
        return DivisorClass.build(cfg, e={(n, i): 1, (n, i + 1): -1})
    return DivisorClass.build(cfg, e={(n, i): 1, (n, i - 1): -1})


def coroot(cfg, idx) -> CurveClass:
    n, i = _idx(cfg, idx)
    if i == 0:
        return CurveClass.build(cfg, h={n - 1: 1, n + 1: 1}, e={(n, 1): -1, (n, -1): -1})
    if i > 0:
        return CurveClass.build(cfg, e={(n, i): 1, (n, i + 1): -1})
    return CurveClass.build(cfg, e={(n, i): 1, (n, i - 1): -1})


def reflect_in(v, a: DivisorClass, ac: CurveClass):
    """Reflection in an arbitrary pair ``(a, ac)`` with ``<a, ac> = -2``."""
    if isinstance(v, DivisorClass):
        return v + a * pairing(v, ac)
    return v + ac * pairing(a, v)


def reflect(cfg, idx, v):
    return reflect_in(v, root(cfg, idx), coroot(cfg, idx))


def cartan_entry(cfg, a, b) -> int:
    return -pairing(root(cfg, a), coroot(cfg, b))


def cartan_matrix(cfg, roots=None) -> list:
    roots = cfg.roots if roots is None else roots
    return [[cartan_entry(cfg, a, b) for b in roots] for a in roots]


def invariant_classes(cfg):
    """Return ``(delta, delta_check, D0, Dinf, d0, dinf)``; lists indexed n = 1..N."""
    N = cfg.N
    delta = DivisorClass.build(
        cfg, h={n: 1 for n in range(1, N + 1)}, e={lab: -1 for lab in cfg.eindex}
    )
    delta_c = CurveClass.build(
        cfg, h={n: 2 for n in range(1, N + 1)}, e={lab: -1 for lab in cfg.eindex}
    )
    D0, Dinf, d0, dinf = [], [], [], []
    for n in range(1, N + 1):
        e0 = {(n + 1, i): -1 for i in range(1, cfg.kn(n + 1) + 1)}
        e0.update({(n - 1, -j): -1 for j in range(1, cfg.ln(n - 1) + 1)})
        einf = {(n - 1, i): -1 for i in range(1, cfg.kn(n - 1) + 1)}
        einf.update({(n + 1, -j): -1 for j in range(1, cfg.ln(n + 1) + 1)})
        D0.append(DivisorClass.build(cfg, h={n: 1}, e=e0))
        Dinf.append(DivisorClass.build(cfg, h={n: 1}, e=einf))
        d0.append(CurveClass.build(cfg, h={n - 1: 1, n + 1: 1}, e=e0))
        dinf.append(CurveClass.build(cfg, h={n - 1: 1, n + 1: 1}, e=einf))
    return delta, delta_c, D0, Dinf, d0, dinf


# ---------------------------------------------------------------------------
# root lattice coordinates and the null pair


def root_coordinates(cfg, a: DivisorClass) -> dict | None:
    """Integer coordinates of ``a`` over the simple roots, or None if ``a`` is not in Q."""
    coords = {}
    for n in range(1, cfg.N + 1):
        c0 = a.h(n)
        coords[RootIndex(n, 0)] = c0
        prev = c0
        for i in range(1, cfg.kn(n)):
            prev = a.e(n, i) + prev
            coords[RootIndex(n, i)] = prev
        if a.e(n, cfg.kn(n)) != -prev:
            return None
        prev = c0
        for j in range(1, cfg.ln(n)):
            prev = a.e(n, -j) + prev
            coords[RootIndex(n, -j)] = prev
        if a.e(n, -cfg.ln(n)) != -prev:
            return None
    return {r: x for r, x in coords.items() if x}


def companion_coroot(cfg, a: DivisorClass) -> CurveClass:
    """The coroot with the same coordinates as the root-lattice element ``a``."""
    coords = root_coordinates(cfg, a)
    if coords is None:
        raise ValueError("class is not in the root lattice")
    out = CurveClass.zero(cfg)
    for r, x in coords.items():
        out = out + coroot(cfg, r) * x
    return out


def _integer_kernel_vector(M: list) -> list | None:
    """A primitive nonnegative integer vector spanning a one-dimensional kernel."""
    from sympy import Matrix, ilcm, igcd

    ker = Matrix(M).nullspace()
    if len(ker) != 1:
        return None
    v = ker[0]
    den = ilcm(*[x.q for x in v])
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = igcd(g, x)
    ints = [x // g for x in ints]
    if all(x <= 0 for x in ints):
        ints = [-x for x in ints]
    if any(x < 0 for x in ints):
        return None
    return ints


def null_pair(cfg, exclude=()):
    """Null root ``delta`` and dual ``delta_check`` for the translation formula.

    When ``<delta, delta_check> = 0`` for the anticanonical pair it is used.
    Otherwise the null vector of the Cartan matrix of the sub-diagram without
    ``exclude`` is taken (this is how frozen-node affine shapes are handled).
    """
    delta, delta_c, *_ = invariant_classes(cfg)
    excl = {cfg.root_index(*r) for r in exclude}
    if not excl and pairing(delta, delta_c) == 0:
        return delta, delta_c
    roots = [r for r in cfg.roots if r not in excl]
    m = _integer_kernel_vector(cartan_matrix(cfg, roots))
    if m is None:
        raise NotAffine(f"shape {cfg.label()} has no affine null root")
    d = DivisorClass.zero(cfg)
    dc = CurveClass.zero(cfg)
    for r, x in zip(roots, m):
        d = d + root(cfg, r) * x
        dc = dc + coroot(cfg, r) * x
    return d, dc


def affine_roots(cfg, exclude=()) -> tuple:
    excl = {cfg.root_index(*r) for r in exclude}
    return tuple(r for r in cfg.roots if r not in excl)


def check_affine(cfg, null=None, roots=None):
    d, dc = null if null is not None else invariant_classes(cfg)[:2]
    roots = cfg.roots if roots is None else roots
    if pairing(d, dc) != 0:
        raise NotAffine("<delta, delta_check> != 0")
    for r in roots:
        if pairing(d, coroot(cfg, r)) or pairing(root(cfg, r), dc):
            raise NotAffine(f"null pair is not orthogonal to root {r}")


def kac_translate(cfg, alpha: DivisorClass, v, alpha_check: CurveClass | None = None, null=None):
    """Translation ``t_alpha`` of a divisor or curve class."""
    if alpha_check is None:
        alpha_check = companion_coroot(cfg, alpha)
    d, dc = null if null is not None else invariant_classes(cfg)[:2]
    if pairing(d, dc) != 0 or pairing(d, alpha_check) != 0 or pairing(alpha, dc) != 0:
        raise NotAffine("translation needs a null pair orthogonal to alpha")
    aa = pairing(alpha, alpha_check)
    if isinstance(v, DivisorClass):
        ld = pairing(v, dc)
        twice = 2 * pairing(v, alpha_check) - aa * ld
        if twice % 2:
            raise HalfIntegerResult("non-integral translation coefficient")
        return v - alpha * ld + d * (twice // 2)
    ld = pairing(d, v)
    twice = 2 * pairing(alpha, v) - aa * ld
    if twice % 2:
        raise HalfIntegerResult("non-integral translation coefficient")
    return v - alpha_check * ld + dc * (twice // 2)


# ---------------------------------------------------------------------------
# words


_TOKEN = re.compile(r"s(-?\d+)\.(-?\d+)|pi|iota|r0|r1|s(\d+)")


def parse_word(text: str) -> tuple:
    """Parse tokens ``s<n>.<i>``, ``pi``, ``iota``, ``r0``, ``r1`` (comma/space separated).

    A bare ``s<n>`` means ``s<n>.0``.
    """
    toks = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    out = []
    for t in toks:
        m = _TOKEN.fullmatch(t)
        if not m:
            raise UnknownGenerator(f"unknown generator token {t!r}")
        if m.group(1) is not None:
            out.append(RootIndex(int(m.group(1)), int(m.group(2))))
        elif m.group(3) is not None:
            out.append(RootIndex(int(m.group(3)), 0))
        else:
            out.append(t)
    return tuple(out)


def format_word(word) -> str:
    return " ".join(str(g) for g in word)


def apply_word_lattice(cfg, word, v, act=None):
    """Apply ``g_1 g_2 ... g_m`` to ``v``; the rightmost generator acts first.

    ``act(g, v)`` handles generators that are not simple reflections.
    """
    for g in reversed(tuple(word)):
        if isinstance(g, tuple):
            v = reflect(cfg, g, v)
        elif act is not None:
            v = act(g, v)
        else:
            raise UnknownGenerator(f"generator {g!r} has no lattice action here")
    return v


def reflection_word(cfg, beta: DivisorClass, roots=None) -> tuple:
    """A word ``w`` with ``s_beta = w``, found by descending ``beta`` to a simple root.

    ``beta`` must be a positive real root of the (sub-)diagram spanned by ``roots``.
    """
    roots = cfg.roots if roots is None else tuple(roots)
    simple = {root(cfg, r): r for r in roots}
    path = []
    b = beta
    for _ in range(10_000):
        if b in simple:
            r = simple[b]
            inv = tuple(reversed(path))
            return tuple(path) + (r,) + inv
        for r in roots:
            p = pairing(b, coroot(cfg, r))
            if p < 0:
                b = b + root(cfg, r) * p
                path.append(r)
                break
        else:
            raise ValueError("class is not a positive real root")
    raise ValueError("root descent did not terminate")


def translation_word(cfg, r, null=None, roots=None) -> tuple:
    """A reflection word realizing ``t_alpha`` for a simple root ``alpha = root(r)``.

    Both products of the reflections in ``delta - alpha`` and ``alpha`` are tried
    and the one agreeing with :func:`kac_translate` on every basis class is returned.
    """
    r = cfg.root_index(*r)
    d, dc = null if null is not None else invariant_classes(cfg)[:2]
    alpha = root(cfg, r)
    w = reflection_word(cfg, d - alpha, roots)
    for cand in (w + (r,), (r,) + w):
        if all(
            apply_word_lattice(cfg, cand, b) == kac_translate(cfg, alpha, b, coroot(cfg, r), (d, dc))
            for b in divisor_basis(cfg) + curve_basis(cfg)
        ):
            return cand
    raise ValueError("no reflection word matches the translation")
