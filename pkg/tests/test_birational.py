import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from weyltrop.algebra import LaurentPoly, RationalExpression, expr_equals, substitute, var
from weyltrop.birational import (
    Frame,
    ParamSystem,
    TropicalMap,
    act_f,
    act_f_omega,
    act_params,
    act_x,
    apply_word,
    f_name,
    frame_maps,
    generator_images,
    random_point,
    tau_name,
    tropical_step,
    ultradiscrete_eval,
    x_name,
)
from weyltrop.errors import AssumptionViolated, NotSubtractionFree
from weyltrop.lattice import RootIndex, ShapeConfig
from weyltrop.suites import frame_suite

A2 = ShapeConfig.A(3)
A3 = ShapeConfig.A(4)
GEN = ShapeConfig(3, (2, 1, 1), (1, 2, 1))
D3 = ShapeConfig.D(3)
BAD = ShapeConfig(3, (2, 1, 1), (1, 1, 1))


def state(cfg):
    return ParamSystem.generic(cfg).initial()


def mono(e):
    return LaurentPoly.monomial(e)


class TestParams:
    def test_reflection_inverts_own_variable(self):
        st0 = state(A2)
        st1 = act_params(st0, RootIndex(1, 0))
        assert st1.a0(1) == st0.a0(1).inverse()
        assert st1.a0(2) == st0.a0(1) * st0.a0(2)

    @pytest.mark.parametrize("cfg", [A2, GEN, D3], ids=lambda c: c.label())
    def test_involution(self, cfg):
        st0 = state(cfg)
        for r in cfg.roots:
            assert act_params(act_params(st0, r), r) == st0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_swaps_u_and_inverse_v(self, n):
        st0 = state(A2)
        st1 = act_params(st0, RootIndex(n, 0))
        assert st1.u(n) == st0.v(n).inverse()
        assert st1.v(n) == st0.u(n).inverse()

    @pytest.mark.parametrize("cfg", [A2, GEN, D3], ids=lambda c: c.label())
    def test_uv_web(self, cfg):
        st0 = state(cfg)
        for w in ([], [RootIndex(1, 0)], list(cfg.roots[:3])):
            s = st0
            for g in w:
                s = act_params(s, g)
            for n in range(1, cfg.N + 1):
                assert s.u(n) * s.v(n) == s.a0(n)
                for i in range(2, cfg.kn(n) + 1):
                    assert s.u(n, i) == s.a((n, i - 1)) * s.u(n, i - 1)
                for j in range(2, cfg.ln(n) + 1):
                    assert s.v(n, j) == s.a((n, -j + 1)) * s.v(n, j - 1)


class TestFFrame:
    def test_a_case_formula(self):
        st0 = state(A2)
        img = generator_images(st0, RootIndex(1, 0), Frame(A2, "f"))
        f1, f3 = var("f1"), var("f3")
        u, v = st0.u(1), st0.v(1)
        expect = RationalExpression(mono(st0.a0(1) ** Fraction(1, 2)) * f3 * (f1 + mono(v.inverse())), f1 + mono(u))
        assert expr_equals(img["f3"], expect)

    def test_nonzero_index_generators_fix_f(self):
        st0 = state(GEN)
        ident = Frame(GEN, "f").identity()
        out = act_f(st0, RootIndex(1, 1), ident)
        assert all(expr_equals(out[k], ident[k]) for k in ident)

    @pytest.mark.parametrize("cfg", [A2, D3], ids=lambda c: c.label())
    def test_omega_form_agrees(self, cfg):
        st0 = state(cfg)
        ident = Frame(cfg, "f").identity()
        for n in range(1, cfg.N + 1):
            g = RootIndex(n, 0)
            a, b = act_f(st0, g, ident), act_f_omega(st0, g, ident)
            assert all(expr_equals(a[k], b[k]) for k in ident)

    def test_omega_in_a_case(self):
        assert all(A2.omega(n) == Fraction(1, 2) for n in (1, 2, 3))

    def test_assumption_guard(self):
        st0 = state(BAD)
        with pytest.raises(AssumptionViolated):
            act_f_omega(st0, RootIndex(2, 0), Frame(BAD, "f").identity())
        with pytest.raises(AssumptionViolated):
            act_x(st0, RootIndex(2, 0), Frame(BAD, "x").identity())
        act_f(st0, RootIndex(2, 0), Frame(BAD, "f").identity())


class TestXAndTau:
    def test_x_changes_only_its_own_variable(self):
        st0 = state(A2)
        img = generator_images(st0, RootIndex(2, 0), Frame(A2, "x"))
        assert set(img) == {x_name(2)}

    def test_tau_permutation_generators(self):
        st0 = state(GEN)
        img = generator_images(st0, RootIndex(1, 1), Frame(GEN, "tau"))
        assert expr_equals(img[tau_name(1, 1)], RationalExpression(var(tau_name(1, 2))))
        assert expr_equals(img[tau_name(1, 2)], RationalExpression(var(tau_name(1, 1))))

    def test_a_case_tau_formula(self):
        st0 = state(A2)
        img = generator_images(st0, RootIndex(2, 0), Frame(A2, "tau"))
        t = lambda n, i: var(tau_name(n, i))  # noqa: E731
        v = st0.v(2)
        num = mono(v ** Fraction(1, 2)) * t(3, 1) * t(1, -1) + mono(v ** Fraction(-1, 2)) * t(1, 1) * t(3, -1)
        assert expr_equals(img[tau_name(2, 1)], RationalExpression(num, t(2, -1)))

    def test_frame_maps(self):
        tau_to_f, tau_to_x, x_to_f, tau_to_zeta = frame_maps(A2)
        t = lambda n, i: var(tau_name(n, i))  # noqa: E731
        assert expr_equals(tau_to_f[f_name(1)], RationalExpression(t(2, 1) * t(3, -1), t(3, 1) * t(2, -1)))
        for n in (1, 2, 3):
            assert expr_equals(substitute(x_to_f[f_name(n)], tau_to_x), tau_to_f[f_name(n)])

    @pytest.mark.parametrize("cfg", [A2, D3], ids=lambda c: c.label())
    def test_tau_intertwines_f_and_x(self, cfg):
        st0 = state(cfg)
        tau_to_f, tau_to_x, x_to_f, _ = frame_maps(cfg)
        for g in cfg.roots:
            timg = generator_images(st0, g, Frame(cfg, "tau"))
            fimg = Frame(cfg, "f").identity() | generator_images(st0, g, Frame(cfg, "f"))
            ximg = Frame(cfg, "x").identity() | generator_images(st0, g, Frame(cfg, "x"))
            for name, e in tau_to_f.items():
                assert expr_equals(substitute(e, timg), substitute(fimg[name], tau_to_f))
            for name, e in tau_to_x.items():
                assert expr_equals(substitute(e, timg), substitute(ximg[name], tau_to_x))


class TestWords:
    def test_empty_word(self):
        st0 = state(A2)
        s, ex = apply_word(st0, Frame(A2, "tau"), ())
        assert s == st0 and all(expr_equals(ex[k], var(k)) for k in ex)

    @pytest.mark.parametrize("kind", ["f", "x", "tau"])
    def test_square_is_identity(self, kind):
        st0 = state(A2)
        s, ex = apply_word(st0, Frame(A2, kind), (RootIndex(1, 0), RootIndex(1, 0)))
        assert s == st0 and all(expr_equals(ex[k], var(k)) for k in ex)

    def test_right_action_threads_parameters(self):
        st0 = state(A2)
        g, h = RootIndex(1, 0), RootIndex(2, 0)
        fr = Frame(A2, "f")
        _, ex = apply_word(st0, fr, (g, h))
        step = act_f(st0, g, fr.identity())
        step = act_f(act_params(st0, g), h, step)
        assert all(expr_equals(ex[k], step[k]) for k in ex)

    @pytest.mark.parametrize("cfg", [A2, A3, D3], ids=lambda c: c.label())
    def test_relations_in_every_frame(self, cfg):
        bad = [r for r in frame_suite(ParamSystem.generic(cfg)) if not r.ok]
        assert bad == []


class TestTropical:
    def test_rules(self):
        a, b = var("a"), var("b")
        pt = {"a": 1, "b": 2}
        assert ultradiscrete_eval(RationalExpression(a * b), pt) == 3
        assert ultradiscrete_eval(RationalExpression(a + b), pt) == 1
        assert ultradiscrete_eval(RationalExpression(a, b), pt) == -1

    def test_subtraction_is_rejected(self):
        with pytest.raises(NotSubtractionFree):
            ultradiscrete_eval(RationalExpression(var("a") - var("b")), {"a": 1, "b": 0})

    def test_images_are_subtraction_free(self):
        for cfg in (A2, D3):
            st0 = state(cfg)
            for kind in ("f", "x", "tau"):
                for g in cfg.roots:
                    for e in generator_images(st0, g, Frame(cfg, kind)).values():
                        assert RationalExpression.coerce(e).sf

    def test_compiled_map_matches_step(self):
        st0 = state(A2)
        fr = Frame(A2, "f")
        rng = random.Random(3)
        names = list(fr.variables) + sorted(st0.values)
        g = RootIndex(1, 0)
        m = TropicalMap(st0, g, fr)
        for _ in range(20):
            p = random_point(names, rng)
            assert m(p) == tropical_step(st0, g, fr, p)

    @given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=10), min_size=6, max_size=6))
    def test_involution_pointwise(self, xs):
        st0 = state(A2)
        fr = Frame(A2, "f")
        names = list(fr.variables) + sorted(st0.values)
        p = dict(zip(names, xs))
        for g in A2.roots:
            m = TropicalMap(st0, g, fr)
            assert m(m(p)) == p

