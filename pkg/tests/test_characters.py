import itertools
import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from weyltrop.characters import (
    QContext,
    c_nu,
    conjugate,
    default_truncation,
    elliptic_gamma,
    hook_lengths,
    is_n_core,
    lambda_of_nu,
    maya_from_nu,
    p_k,
    p_list,
    pochhammer1,
    pochhammer2,
    schur,
    size,
    uc_prefactors,
    universal_character,
    verify_bilinear,
    verify_specialization_against_tau,
    a_engine,
    x_schur,
    schur_prefactors,
)
from weyltrop.errors import BadShape, NonConvergent

X = sympy.symbols("x1:12")
Y = sympy.symbols("y1:12")

partitions = st.lists(st.integers(0, 4), max_size=4).map(lambda p: tuple(sorted(p, reverse=True)))


def weighted(expr, wx, wy):
    """Substitute ``x_n -> s^n x_n`` and ``y_n -> s^(-n) y_n``."""
    s = sympy.Symbol("s")
    sub = {x: s ** (n + 1) * x for n, x in enumerate(X[:wx])}
    sub.update({y: s ** (-(n + 1)) * y for n, y in enumerate(Y[:wy])})
    return sympy.expand(sympy.sympify(expr).subs(sub, simultaneous=True)), s


class TestPk:
    def test_small(self):
        assert sympy.expand(p_k(2, X) - (X[0] ** 2 / 2 + X[1])) == 0
        assert p_k(0, X) == 1 and p_k(-1, X) == 0

    def test_series(self):
        # exp(sum x_n z^n) = prod_n exp(x_n z^n), each factor truncated at z^10
        K = 10
        coeffs = [sympy.Integer(1)] + [sympy.Integer(0)] * K
        for n in range(1, K + 1):
            factor = [sympy.Integer(0)] * (K + 1)
            for m in range(K // n + 1):
                factor[n * m] = X[n - 1] ** m / sympy.factorial(m)
            coeffs = [sum(coeffs[i] * factor[k - i] for i in range(k + 1)) for k in range(K + 1)]
        for k, pk in enumerate(p_list(K, X)):
            assert sympy.expand(coeffs[k] - pk) == 0

    @given(st.lists(st.fractions(max_denominator=5), min_size=6, max_size=6))
    def test_exact_fields(self, xs):
        # numeric rational inputs agree with the symbolic value
        sym = sympy.expand(p_k(5, X))
        num = p_k(5, xs)
        assert sympy.Rational(num.numerator, num.denominator) == sym.subs(dict(zip(X, xs)))


class TestCharacters:
    def test_reference_value(self):
        S = universal_character((2, 1), (1,), X, Y)
        x1, x3, y1 = X[0], X[2], Y[0]
        assert sympy.expand(S - ((x1**3 / 3 - x3) * y1 - x1**2)) == 0

    def test_empty(self):
        assert universal_character((), (), X, Y) == 1

    @pytest.mark.parametrize("lam", [(1,), (2,), (1, 1), (2, 1), (3, 1, 1)])
    def test_reduces_to_schur(self, lam):
        assert sympy.expand(universal_character(lam, (), X, Y) - schur(lam, X)) == 0

    def test_schur_examples(self):
        assert sympy.expand(schur((1, 1), X) - (X[0] ** 2 / 2 - X[1])) == 0
        assert sympy.expand(schur((2,), X) - p_k(2, X)) == 0

    def test_homogeneity_random_pairs(self):
        rng = random.Random(5)
        for _ in range(50):
            lam = tuple(sorted((rng.randint(0, 3) for _ in range(rng.randint(0, 3))), reverse=True))
            mu = tuple(sorted((rng.randint(0, 3) for _ in range(rng.randint(0, 2))), reverse=True))
            S = universal_character(lam, mu, X, Y)
            w, s = weighted(S, 11, 11)
            assert sympy.expand(w - s ** (sum(lam) - sum(mu)) * sympy.expand(S)) == 0


class TestPartitions:
    def test_reference_lambda(self):
        assert lambda_of_nu((2, 0, 3), 3) == (4, 2, 1, 1)

    def test_vacuum(self):
        for N in (2, 3, 4):
            assert lambda_of_nu((0,) * N) == ()

    def test_shift_invariance(self):
        assert lambda_of_nu((3, 1, 4)) == lambda_of_nu((2, 0, 3))

    def test_bad_length(self):
        with pytest.raises(BadShape):
            maya_from_nu((1, 2), 3)

    def test_conjugate_and_hooks(self):
        assert conjugate((4, 2, 1, 1)) == (4, 2, 1, 1)
        assert conjugate((3, 1)) == (2, 1, 1)
        assert hook_lengths((2, 1)) == {(1, 1): 3, (1, 2): 1, (2, 1): 1}

    def test_core_examples(self):
        assert is_n_core((2,), 3) and not is_n_core((3,), 3)
        assert is_n_core((4, 2, 1, 1), 3)
        assert not is_n_core((2, 2), 3)

    @given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
    def test_always_core(self, nu):
        assert is_n_core(lambda_of_nu(tuple(nu), 3), 3)

    @given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
    def test_always_core_n4(self, nu):
        assert is_n_core(lambda_of_nu(tuple(nu), 4), 4)

    def test_every_small_core_appears(self):
        for N in (2, 3):
            got = {lambda_of_nu(nu, N) for nu in itertools.product(range(-4, 5), repeat=N) if sum(nu) == 0}
            small = set()
            for n in range(13):
                for p in sympy.utilities.iterables.partitions(n):
                    lam = tuple(sorted((k for k, m in p.items() for _ in range(m)), reverse=True))
                    if is_n_core(lam, N):
                        small.add(lam)
            assert small <= got

    @given(partitions)
    def test_conjugate_involution(self, lam):
        assert conjugate(conjugate(lam)) == tuple(p for p in lam if p)
        assert size(conjugate(lam)) == size(lam)


@pytest.fixture
def ctx():
    return QContext(Fraction(1, 2), Fraction(3, 4), c=Fraction(2, 3))


class TestQProducts:
    def test_zero(self, ctx):
        assert pochhammer1(0, ctx.q, ctx.T) == 1

    def test_euler_reference(self, ctx):
        # (q; q) against the pentagonal series
        q = ctx.q
        series = mpmath.mpf(0)
        for k in range(-60, 61):
            series += (-1) ** k * q ** (k * (3 * k - 1) // 2)
        assert abs(pochhammer1(q, q, 400) - series) < mpmath.mpf(10) ** -50

    def test_gamma_functional_equation(self, ctx):
        # Gamma(qz; p, q) = theta(z; p) Gamma(z; p, q) with theta(z; p) = (z; p)(p/z; p)
        p, q, z = ctx.q**2, ctx.q**3, mpmath.mpf("0.3")
        T = ctx.T
        theta = pochhammer1(z, p, T) * pochhammer1(p / z, p, T)
        lhs = elliptic_gamma(q * z, p, q, T)
        rhs = theta * elliptic_gamma(z, p, q, T)
        assert abs(lhs - rhs) / abs(rhs) < mpmath.mpf(10) ** -40

    def test_double_product_symmetric(self, ctx):
        a, b, z = ctx.q**2, ctx.q**3, mpmath.mpf("0.7")
        assert abs(pochhammer2(z, a, b, ctx.T) - pochhammer2(z, b, a, ctx.T)) < mpmath.mpf(10) ** -50

    def test_convergence_in_T(self, ctx):
        q = ctx.q
        vals = [pochhammer1(q, q, T) for T in (10, 20, 40, 80)]
        gaps = [abs(a - vals[-1]) for a in vals[:-1]]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_truncation_grows_with_tolerance(self):
        assert default_truncation(0.5, 1e-30) > default_truncation(0.5, 1e-10)

    @pytest.mark.parametrize("q", [2, 1, -1, Fraction(-3, 2)])
    def test_nonconvergent(self, q):
        with pytest.raises(NonConvergent):
            QContext(q)
        with pytest.raises(NonConvergent):
            pochhammer1(0.5, mpmath.mpf(float(q)), 10)


class TestPrefactors:
    def test_vacuum_hook_factor(self, ctx):
        _, H, x = schur_prefactors(ctx, 3, (0, 0, 0), 0)
        assert H == 1

    def test_x_at_unit_t(self, ctx):
        q = ctx.q
        assert abs(x_schur(q, 1, 1)[0] - 2 / (q - 1 / q)) < mpmath.mpf(10) ** -50

    def test_c_nu_at_vacuum(self, ctx):
        assert c_nu(ctx, (0, 0, 0, 0)) == ctx.c
        assert abs(c_nu(ctx, (1, 0, 0, 0)) - ctx.c / ctx.q**2) < mpmath.mpf(10) ** -50

    def test_uc_shape(self, ctx):
        with pytest.raises(BadShape):
            uc_prefactors(ctx, 1, (0, 0, 0), 0)


class TestBilinear:
    @pytest.mark.parametrize("nu,i,kappa", [((0, 0, 0), 1, 0), ((1, 0, -1), 2, 1), ((2, -2, 0), 3, -2)])
    def test_schur_examples(self, ctx, nu, i, kappa):
        assert verify_bilinear(ctx, 3, nu, i, kappa, "schur") < 1e-12

    @pytest.mark.parametrize("nu,i,kappa", [((0, 0, 0, 0), 1, 0), ((1, 1, 0, 0), 2, 1), ((2, 0, -1, 1), 4, -1)])
    def test_uc_examples(self, ctx, nu, i, kappa):
        assert verify_bilinear(ctx, 4, nu, i, kappa, "uc") < 1e-12

    def test_uc_needs_even(self, ctx):
        with pytest.raises(BadShape):
            verify_bilinear(ctx, 3, (0, 0, 0), 1, 0, "uc")

    def test_bad_index(self, ctx):
        with pytest.raises(BadShape):
            verify_bilinear(ctx, 3, (0, 0, 0), 4, 0, "schur")

    def test_other_parameters(self):
        # the identities hold for any b0, q and c
        for b0 in (Fraction(2, 5), Fraction(5, 7)):
            c = QContext(Fraction(1, 3), b0, c=Fraction(3, 5))
            assert verify_bilinear(c, 3, (1, 0, 0), 1, 0, "schur") < 1e-12
            assert verify_bilinear(c, 4, (1, 0, 0, 0), 1, 0, "uc") < 1e-12

    @pytest.mark.parametrize("N,mode,nu", [(3, "schur", (1, -1, 0)), (4, "uc", (1, 0, -1, 0))])
    def test_residual_shrinks_with_T(self, N, mode, nu):
        res = []
        for T in (8, 16, 32):
            c = QContext(Fraction(1, 2), Fraction(3, 4), c=Fraction(2, 3), T=T)
            res.append(verify_bilinear(c, N, nu, 1, 1, mode))
        assert res[0] > res[1] > res[2]


class TestAgainstTau:
    @pytest.mark.parametrize("N,mode,depth", [(3, "schur", 2), (4, "uc", 1)])
    def test_orbit(self, ctx, N, mode, depth):
        eng = a_engine(N)
        eng.run(depth)
        for el, _ in list(eng.table.values()):
            assert verify_specialization_against_tau(ctx, N, el, mode, eng) < 1e-12
