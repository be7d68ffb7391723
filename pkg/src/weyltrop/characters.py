"""Partitions, Maya diagrams, Schur functions and universal characters, and the
numeric check of the character formulas for A-type tau-functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import mpmath

from .errors import BadShape, DegenerateScale, NonConvergent

# ---------------------------------------------------------------------------
# partitions and Maya diagrams


def normalize_partition(parts) -> tuple:
    parts = tuple(int(p) for p in parts)
    if any(a < b for a, b in zip(parts, parts[1:])) or any(p < 0 for p in parts):
        raise ValueError(f"not a partition: {parts}")
    return tuple(p for p in parts if p)


def size(lam) -> int:
    return sum(lam)


def conjugate(lam) -> tuple:
    lam = normalize_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > j) for j in range(lam[0]))


def hook_lengths(lam) -> dict:
    """``{(i, j): h_ij}`` over the cells, 1-based."""
    lam = normalize_partition(lam)
    lc = conjugate(lam)
    return {(i, j): lam[i - 1] + lc[j - 1] - i - j + 1 for i in range(1, len(lam) + 1) for j in range(1, lam[i - 1] + 1)}


def is_n_core(lam, N: int) -> bool:
    return all(h % N for h in hook_lengths(lam).values())


@dataclass(frozen=True)
class MayaDiagram:
    """``m(nu) = union_i (N Z_{<nu_i} + i)``, stored through ``nu`` and ``N``."""

    nu: tuple
    N: int

    def contains(self, m: int) -> bool:
        i = (m - 1) % self.N + 1
        return (m - i) // self.N < self.nu[i - 1]

    def top(self, count: int) -> list:
        """The ``count`` largest elements, descending."""
        hi = self.N * max(self.nu) + self.N
        out = []
        m = hi
        while len(out) < count:
            if self.contains(m):
                out.append(m)
            m -= 1
        return out


def maya_from_nu(nu, N: int | None = None) -> MayaDiagram:
    nu = tuple(int(x) for x in nu)
    N = len(nu) if N is None else N
    if len(nu) != N:
        raise BadShape("nu must have N entries")
    return MayaDiagram(nu, N)


def partition_of(m: MayaDiagram) -> tuple:
    """The partition with ``m_i - m_{i+1} = lambda_i - lambda_{i+1} + 1``.

    The charge is fixed so that ``nu = 0`` gives the empty partition:
    ``lambda_i = m_i + i - 1 - |nu|``.
    """
    charge = sum(m.nu)
    # the diagram agrees with {m <= charge} below N*min(nu)
    depth = m.N * (max(m.nu) - min(m.nu)) + m.N + 1
    top = m.top(depth)
    lam = [x + i - charge for i, x in enumerate(top)]
    return normalize_partition([x for x in lam if x > 0])


def lambda_of_nu(nu, N: int | None = None) -> tuple:
    return partition_of(maya_from_nu(nu, N))


# ---------------------------------------------------------------------------
# character polynomials


def p_k(k: int, x) -> object:
    """Coefficient of ``z^k`` in ``exp(sum x_n z^n)``; works for any field elements."""
    return p_list(k, x)[k] if k >= 0 else 0


def p_list(kmax: int, x) -> list:
    """``[p_0, ..., p_kmax]`` via ``k p_k = sum_m m x_m p_{k-m}``."""
    out = [1]
    for k in range(1, kmax + 1):
        s = 0
        for m in range(1, k + 1):
            xm = x[m - 1] if m - 1 < len(x) else 0
            if xm:
                s = s + m * xm * out[k - m]
        out.append(_div(s, k))
    return out


def _div(a, k: int):
    if isinstance(a, int):
        return Fraction(a, k)
    return a / k


def _det(M: list):
    n = len(M)
    if n == 0:
        return 1
    try:
        import sympy

        if any(isinstance(e, sympy.Basic) for row in M for e in row):
            return sympy.expand(sympy.Matrix(M).det(method="berkowitz"))
    except ImportError:  # pragma: no cover
        pass
    A = [list(r) for r in M]
    det = 1
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(A[r][c]))
        if not A[piv][c]:
            return 0 * det
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        inv = _div(1, 1) / A[c][c] if isinstance(A[c][c], (int, Fraction)) else 1 / A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] * inv
            if f:
                for j in range(c, n):
                    A[r][j] = A[r][j] - f * A[c][j]
    return det


def _pk(table, k):
    return table[k] if 0 <= k < len(table) else 0


def universal_character(lam, mu, x, y, px=None, py=None):
    """``S_[lam, mu](x, y)`` by the twisted Jacobi-Trudi determinant.

    ``px``/``py`` may carry precomputed ``p_k`` lists.
    """
    lam, mu = normalize_partition(lam), normalize_partition(mu)
    r, rp = len(lam), len(mu)
    n = r + rp
    kmax = max([0] + [p + n for p in lam + mu])
    px = px if px is not None and len(px) > kmax else p_list(kmax, x)
    py = py if py is not None and len(py) > kmax else p_list(kmax, y)
    M = []
    for i in range(1, n + 1):
        if i <= rp:
            M.append([_pk(py, mu[rp - i] + i - j) for j in range(1, n + 1)])
        else:
            M.append([_pk(px, lam[i - rp - 1] - i + j) for j in range(1, n + 1)])
    return _det(M)


def schur(lam, x, px=None):
    return universal_character(lam, (), x, (), px=px, py=[1])


# ---------------------------------------------------------------------------
# q-products


@dataclass
class QContext:
    """Numeric context; ``T`` truncates every infinite product."""

    q: object
    b0: object = Fraction(3, 4)
    c: object = Fraction(2, 3)
    precision: int = 200
    tolerance: float = 1e-20
    T: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        mpmath.mp.prec = self.precision
        self.q = _mpf(self.q)
        self.b0 = _mpf(self.b0)
        self.c = _mpf(self.c)
        if not abs(self.q) < 1:
            raise NonConvergent("|q| must be < 1")
        if self.T is None:
            self.T = default_truncation(self.q, self.tolerance)

    @property
    def b1(self):
        return self.q / self.b0


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        a, b = x.split("/")
        return mpmath.mpf(a) / mpmath.mpf(b)
    return mpmath.mpf(x)


def default_truncation(q, tolerance, headroom: int = 32) -> int:
    """``T`` with ``|q|^T < tolerance / 100``, plus ``headroom`` extra factors.

    The headroom covers product arguments up to ``2^headroom / |q|`` in size
    (e.g. ``q^8 t^8`` with ``t = q^kappa / b_0`` and ``kappa = -3``).
    """
    base = math.log(float(tolerance) / 100) / math.log(float(abs(q)))
    return int(math.ceil(base)) + headroom


# Products run over indices < T.  Factors 1 - w with |w| below the working
# precision are skipped: they do not change the rounded value.  The loops run
# in gmpy2 at mpmath's working precision; conversions are exact.


def _to_gmp(x):
    x = mpmath.mpf(x)
    if not x:
        return gmpy2.mpfr(0)
    sign, man, exp, _ = x._mpf_
    return gmpy2.mul_2exp(gmpy2.mpfr(-man if sign else man), exp)


def _to_mp(x):
    if not x:
        return mpmath.mpf(0)
    man, exp = x.as_mantissa_exp()
    return mpmath.mpf((int(man), int(exp)))


def _poch_gmp(z, q, T: int, eps):
    out = gmpy2.mpfr(1)
    t = z
    for _ in range(T):
        if abs(t) < eps:
            break
        out *= 1 - t
        t *= q
    return out


def _gmp_context():
    return gmpy2.context(gmpy2.get_context(), precision=mpmath.mp.prec + 16)


def pochhammer1(z, q, T: int):
    """``(z; q)_inf`` truncated to ``i < T``."""
    if not abs(q) < 1:
        raise NonConvergent("|q| >= 1")
    with _gmp_context():
        eps = gmpy2.mpfr(2) ** (-mpmath.mp.prec - 8)
        return _to_mp(_poch_gmp(_to_gmp(z), _to_gmp(q), T, eps))


def pochhammer2(z, p, q, T: int):
    """``(z; p, q)_inf`` truncated to ``i, j < T``."""
    if not (abs(p) < 1 and abs(q) < 1):
        raise NonConvergent("|p| or |q| >= 1")
    with _gmp_context():
        eps = gmpy2.mpfr(2) ** (-mpmath.mp.prec - 8)
        zi, pp, qq = _to_gmp(z), _to_gmp(p), _to_gmp(q)
        out = gmpy2.mpfr(1)
        for _ in range(T):
            if abs(zi) < eps:
                break
            out *= _poch_gmp(zi, qq, T, eps)
            zi *= pp
        return _to_mp(out)


def elliptic_gamma(z, p, q, T: int):
    return pochhammer2(p * q / z, p, q, T) / pochhammer2(z, p, q, T)


def q_products(ctx: QContext) -> dict:
    T = ctx.T
    return {
        "pochhammer1": lambda z, q=ctx.q: pochhammer1(z, q, T),
        "pochhammer2": lambda z, p, q: pochhammer2(z, p, q, T),
        "elliptic_gamma": lambda z, p, q: elliptic_gamma(z, p, q, T),
    }


# ---------------------------------------------------------------------------
# Schur case


def F_schur(ctx: QContext, N: int, t):
    key = ("F", N, t)
    got = ctx._cache.get(key)
    if got is None:
        q, T = ctx.q, ctx.T
        got = (
            pochhammer2(q ** (2 * N) * t ** (2 * N), q ** (2 * N), q ** (2 * N), T)
            / pochhammer2(q**2 * t**2, q**2, q**2, T)
            * elliptic_gamma(-(q ** (N - 1)) * t ** (N - 1), q ** (N - 1), q ** (N - 1), T)
        )
        ctx._cache[key] = got
    return got


def H_schur(q, lam):
    out = mpmath.mpf(1)
    for (i, j), h in hook_lengths(lam).items():
        out *= (q**h - q ** (-h)) * q ** (mpmath.mpf(i - j) / 2)
    return out


def x_schur(q, t, n_max: int) -> list:
    return [(t**n + t ** (-n)) / (n * (q**n - q ** (-n))) for n in range(1, n_max + 1)]


def t_of(ctx: QContext, kappa: int):
    return ctx.q**kappa / ctx.b0


def schur_prefactors(ctx: QContext, N: int, nu, kappa: int):
    t = t_of(ctx, kappa)
    lam = lambda_of_nu(nu, N)
    kmax = size(lam) + len(lam) + 1
    return F_schur(ctx, N, t), H_schur(ctx.q, lam), x_schur(ctx.q, t, kmax)


def sigma_schur(ctx: QContext, N: int, nu, kappa: int):
    key = ("sigma", N, tuple(nu), kappa)
    got = ctx._cache.get(key)
    if got is None:
        t = t_of(ctx, kappa)
        lam = lambda_of_nu(nu, N)
        F = F_schur(ctx, N, t)
        H = H_schur(ctx.q, lam)
        got = ctx._cache[key] = F * H * schur(lam, None, px=_p_cached(ctx, ("xs", kappa), lambda n: x_schur(ctx.q, t, n)))
    return got


_PMAX = 64


def _p_cached(ctx, key, xf):
    got = ctx._cache.get(key)
    if got is None:
        got = ctx._cache[key] = p_list(_PMAX, xf(_PMAX))
    return got


# ---------------------------------------------------------------------------
# universal character case


def split_nu(nu) -> tuple:
    nu = tuple(nu)
    return nu[0::2], nu[1::2]


def c_nu(ctx: QContext, nu):
    odd, even = split_nu(nu)
    return ctx.c * ctx.q ** (2 * (sum(even) - sum(odd)))


def F_uc(ctx: QContext, g: int, c, t):
    key = ("Ft", g, c, t)
    got = ctx._cache.get(key)
    if got is None:
        q, T = ctx.q, ctx.T
        P = lambda z, a, b: pochhammer2(z, a, b, T)  # noqa: E731
        G = lambda z, a, b: elliptic_gamma(z, a, b, T)  # noqa: E731
        sc = mpmath.sqrt(c)
        m = 4 * g + 4
        got = (
            P(-c * q**3 * t**2, q**2, q**4)
            * P(-(q**3) * t**2 / c, q**2, q**4)
            * P(q**m * t**m, q**m, q**m)
            / P(q**4 * t**4, q**4, q**4)
            * G(-sc * q ** mpmath.mpf(1.5) * t, q, q**2)
            * G(-(q ** mpmath.mpf(1.5)) * t / sc, q, q**2)
            * G(-(q ** (2 * g)) * t ** (2 * g), q ** (2 * g), q ** (2 * g))
        )
        ctx._cache[key] = got
    return got


def H_uc(ctx: QContext, nu, cn):
    q = ctx.q
    g1 = len(nu) // 2
    odd, even = split_nu(nu)
    lo, le = lambda_of_nu(odd, g1), lambda_of_nu(even, g1)
    out = cn ** (mpmath.mpf(size(le) - size(lo)) / 2)
    for h in hook_lengths(lo).values():
        out *= q ** (2 * h) - q ** (-2 * h)
    for h in hook_lengths(le).values():
        out *= q ** (-2 * h) - q ** (2 * h)
    return out


def xy_uc(q, t, cn, n_max: int):
    xs = [(t ** (2 * n) + t ** (-2 * n) - (-cn) ** n * (q**n + q ** (-n))) / (n * (q ** (2 * n) - q ** (-2 * n)))
          for n in range(1, n_max + 1)]
    ys = [(t ** (2 * n) + t ** (-2 * n) - (-cn) ** (-n) * (q**n + q ** (-n))) / (n * (q ** (-2 * n) - q ** (2 * n)))
          for n in range(1, n_max + 1)]
    return xs, ys


def _check_even(N: int) -> int:
    if N % 2 or N < 4:
        raise BadShape("the universal character case needs N = 2g + 2 with g >= 1")
    return (N - 2) // 2


def uc_prefactors(ctx: QContext, g: int, nu, kappa: int):
    N = 2 * g + 2
    if len(nu) != N:
        raise BadShape("nu must have 2g + 2 entries")
    t = t_of(ctx, kappa)
    cn = c_nu(ctx, nu)
    odd, even = split_nu(nu)
    kmax = size(lambda_of_nu(odd)) + size(lambda_of_nu(even)) + N + 2
    xs, ys = xy_uc(ctx.q, t, cn, kmax)
    return F_uc(ctx, g, cn, t), H_uc(ctx, nu, cn), xs, ys


def sigma_uc(ctx: QContext, N: int, nu, kappa: int):
    key = ("sigma~", N, tuple(nu), kappa)
    got = ctx._cache.get(key)
    if got is None:
        g = _check_even(N)
        t = t_of(ctx, kappa)
        cn = c_nu(ctx, nu)
        odd, even = split_nu(nu)
        lo, le = lambda_of_nu(odd, g + 1), lambda_of_nu(even, g + 1)
        pk = ctx._cache.get(("xy", kappa, cn))
        if pk is None:
            xs, ys = xy_uc(ctx.q, t, cn, _PMAX)
            pk = ctx._cache[("xy", kappa, cn)] = (p_list(_PMAX, xs), p_list(_PMAX, ys))
        S = universal_character(lo, conjugate(le), None, None, px=pk[0], py=pk[1])
        got = ctx._cache[key] = F_uc(ctx, g, cn, t) * H_uc(ctx, nu, cn) * S
    return got


# ---------------------------------------------------------------------------
# bilinear certification


def a_pattern(ctx: QContext, N: int, mode: str) -> list:
    """Values of ``a_1..a_N`` under the specialization of each mode."""
    if mode == "schur":
        return [ctx.q] * N
    _check_even(N)
    return [ctx.c if n % 2 else ctx.q**2 / ctx.c for n in range(1, N + 1)]


def sigma(ctx: QContext, N: int, nu, kappa: int, mode: str):
    if mode == "schur":
        return sigma_schur(ctx, N, nu, kappa)
    if mode == "uc":
        return sigma_uc(ctx, N, nu, kappa)
    raise ValueError(f"unknown mode {mode!r}")


def bilinear_sides(ctx: QContext, N: int, nu, i: int, kappa: int, mode: str = "schur"):
    q = ctx.q
    nu = tuple(int(x) for x in nu)
    if not 1 <= i <= N:
        raise BadShape("i must lie in 1..N")
    nu1 = tuple(x + (1 if k == i - 1 else 0) for k, x in enumerate(nu))
    t = t_of(ctx, kappa)
    a = a_pattern(ctx, N, mode)
    pref = q ** (N * nu[i - 1] - sum(nu) + i - 1)
    for j in range(1, N + 1):
        pref *= (a[(i + j - 2) % N] / q) ** (mpmath.mpf(j) / N)
    s = lambda v, k: sigma(ctx, N, v, k, mode)  # noqa: E731
    lhs = pref * (t**N - t ** (-N)) * s(nu, kappa) * s(nu1, kappa)
    rhs = t * s(nu, kappa - 1) * s(nu1, kappa + 1) - s(nu, kappa + 1) * s(nu1, kappa - 1) / t
    return lhs, rhs


def verify_bilinear(ctx: QContext, N: int, nu, i: int, kappa: int, mode: str = "schur"):
    """Relative residual ``|LHS - RHS| / max(|LHS|, |RHS|)``."""
    lhs, rhs = bilinear_sides(ctx, N, nu, i, kappa, mode)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0 or not mpmath.isfinite(scale):
        raise DegenerateScale("both sides vanish or overflow")
    return abs(lhs - rhs) / scale


# ---------------------------------------------------------------------------
# closed forms against tau-values


def seed_values(ctx: QContext, N: int, mode: str = "schur") -> dict:
    """Special values of ``tau_i^{+-1}`` and of the base parameters."""
    from .birational import tau_name

    q, b0 = ctx.q, ctx.b0
    b1 = q / b0
    taus = {}
    for i in range(1, N + 1):
        if mode == "schur":
            taus[tau_name(i, 1)] = F_schur(ctx, N, 1 / b0)
            taus[tau_name(i, -1)] = F_schur(ctx, N, b1)
        else:
            g = _check_even(N)
            cc = ctx.c if i % 2 == 0 else ctx.c / q**2
            taus[tau_name(i, 1)] = F_uc(ctx, g, cc, 1 / b0)
            taus[tau_name(i, -1)] = F_uc(ctx, g, cc, b1)
    a = a_pattern(ctx, N, mode)
    params = {f"a{n}": a[n - 1] for n in range(1, N)}
    params.update({"b0": b0, "b1": b1})
    return {"tau": taus, "params": params}


def a_engine(N: int):
    """Memoized tau engine of the extended A-type group (unmarked frame)."""
    from .birational import generator_images
    from .painleve import AffineConfigA, lattice_act_A
    from .tau import TauEngine

    A = AffineConfigA(N)
    cfg = A.cfg
    st = A.initial()
    return TauEngine(
        A,
        marked=False,
        generators=A.generators,
        lattice_act=lambda g, v: lattice_act_A(cfg, g, v),
        extra_images=lambda g, frame: (generator_images(st, g, frame), A.param_images(g)),
    )


def verify_specialization_against_tau(ctx: QContext, N: int, el, mode: str = "schur", engine=None):
    """Relative difference between the specialized ``tau(Lambda)`` and ``sigma_nu^kappa``."""
    from .algebra import evaluate_mp
    from .painleve import AffineConfigA, nu_kappa_of

    engine = engine or a_engine(N)
    expr = engine.ensure(el)
    sv = seed_values(ctx, N, mode)
    lhs = evaluate_mp(expr, sv["params"], sv["tau"])
    nk = nu_kappa_of(AffineConfigA(N), el.divisor)
    rhs = sigma(ctx, N, nk.nu, nk.kappa, mode)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0:
        raise DegenerateScale("both sides vanish")
    return abs(lhs - rhs) / scale
