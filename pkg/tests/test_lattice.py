import pytest
from hypothesis import given
from hypothesis import strategies as st

from weyltrop.errors import BadShape, IndexOutOfRange, NotAffine
from weyltrop.lattice import (
    DivisorClass,
    E,
    H,
    RootIndex,
    ShapeConfig,
    apply_word_lattice,
    cartan_entry,
    cartan_matrix,
    coroot,
    curve_basis,
    divisor_basis,
    e_,
    h_,
    invariant_classes,
    kac_translate,
    pairing,
    parse_word,
    reflect,
    root,
    translation_word,
)

A2 = ShapeConfig.A(3)
A3 = ShapeConfig.A(4)
GEN = ShapeConfig(3, (2, 1, 1), (1, 2, 1))
D3 = ShapeConfig.D(3)
SHAPES = [A2, A3, GEN, D3]


def classes(cfg):
    coeffs = st.lists(st.integers(-3, 3), min_size=cfg.width, max_size=cfg.width)
    return coeffs.map(lambda c: DivisorClass(cfg, c))


def words(cfg, max_len=8):
    return st.lists(st.sampled_from(cfg.roots), max_size=max_len).map(tuple)


class TestRoots:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_root_table(self, n):
        assert root(A2, (n, 0)) == H(A2, n) - E(A2, n, 1) - E(A2, n, -1)
        assert coroot(A2, (n, 0)) == h_(A2, n - 1) + h_(A2, n + 1) - e_(A2, n, 1) - e_(A2, n, -1)

    def test_nonzero_index_roots(self):
        assert root(GEN, (1, 1)) == E(GEN, 1, 1) - E(GEN, 1, 2)
        assert root(GEN, (2, -1)) == E(GEN, 2, -1) - E(GEN, 2, -2)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            root(A2, (1, 1))

    def test_pairings(self):
        assert pairing(root(A2, (1, 0)), coroot(A2, (1, 0))) == -2
        assert pairing(root(A2, (1, 0)), coroot(A2, (2, 0))) == 1
        assert pairing(H(A2, 1), h_(A2, 2)) == 0
        assert pairing(E(A2, 1, 1), e_(A2, 1, 1)) == -1

    def test_bad_shapes(self):
        with pytest.raises(BadShape):
            ShapeConfig(3, (1, 1), (1, 1, 1))
        with pytest.raises(BadShape):
            ShapeConfig(2, (1, 1), (1, 1))


class TestReflections:
    def test_reflection_images(self):
        assert reflect(A2, (1, 0), E(A2, 1, 1)) == H(A2, 1) - E(A2, 1, -1)
        assert reflect(A2, (1, 0), E(A2, 1, -1)) == H(A2, 1) - E(A2, 1, 1)
        assert reflect(A2, (1, 0), H(A2, 2)) == H(A2, 2) + H(A2, 1) - E(A2, 1, 1) - E(A2, 1, -1)

    @pytest.mark.parametrize("cfg", SHAPES, ids=lambda c: c.label())
    def test_involution_on_random_classes(self, cfg):
        @given(classes(cfg), st.sampled_from(cfg.roots))
        def check(v, r):
            assert reflect(cfg, r, reflect(cfg, r, v)) == v

        check()

    @pytest.mark.parametrize("cfg", SHAPES, ids=lambda c: c.label())
    def test_cartan_entries(self, cfg):
        M = cartan_matrix(cfg)
        for i, row in enumerate(M):
            assert row[i] == 2
            assert all(x in (0, -1) for j, x in enumerate(row) if j != i)
        assert M == [list(r) for r in zip(*M)]

    def test_cartan_far_pair(self):
        assert cartan_entry(GEN, (1, 1), (2, -1)) == 0
        assert cartan_entry(A2, (1, 0), (2, 0)) == -1

    def test_word_semantics(self):
        w = parse_word("s1.0 s2.0")
        v = E(A2, 2, 1)
        assert apply_word_lattice(A2, w, v) == reflect(A2, (1, 0), reflect(A2, (2, 0), v))
        assert apply_word_lattice(A2, (), v) == v


class TestInvariants:
    def test_delta_of_a2(self):
        d, dc, *_ = invariant_classes(A2)
        assert d == sum((root(A2, (n, 0)) for n in (1, 2, 3)), DivisorClass.zero(A2))
        assert pairing(d, dc) == 0

    @pytest.mark.parametrize("cfg", SHAPES, ids=lambda c: c.label())
    def test_roots_orthogonal_to_fibre_classes(self, cfg):
        _, _, D0, Dinf, d0, dinf = invariant_classes(cfg)
        for r in cfg.roots:
            for c in d0 + dinf:
                assert pairing(root(cfg, r), c) == 0

    @pytest.mark.parametrize("cfg", SHAPES, ids=lambda c: c.label())
    def test_words_preserve_pairing(self, cfg):
        d, dc, *_ = invariant_classes(cfg)

        @given(words(cfg), classes(cfg))
        def check(w, v):
            assert apply_word_lattice(cfg, w, d) == d
            assert apply_word_lattice(cfg, w, dc) == dc
            wv = apply_word_lattice(cfg, w, v)
            for c in curve_basis(cfg):
                assert pairing(wv, apply_word_lattice(cfg, w, c)) == pairing(v, c)

        check()


class TestKac:
    def test_fixes_delta(self):
        d = invariant_classes(A2)[0]
        assert kac_translate(A2, root(A2, (1, 0)), d) == d

    def test_zero_translation(self):
        zero = DivisorClass.zero(A2)
        for v in divisor_basis(A2):
            assert kac_translate(A2, zero, v) == v

    @pytest.mark.parametrize("cfg", [A2, A3], ids=lambda c: c.label())
    def test_additivity(self, cfg):
        for a in cfg.roots:
            for b in cfg.roots:
                al, be = root(cfg, a), root(cfg, b)
                for v in divisor_basis(cfg) + curve_basis(cfg):
                    ab = kac_translate(cfg, al, kac_translate(cfg, be, v))
                    ba = kac_translate(cfg, be, kac_translate(cfg, al, v))
                    assert ab == ba == kac_translate(cfg, al + be, v)

    def test_non_affine_shape(self):
        with pytest.raises(NotAffine):
            kac_translate(GEN, root(GEN, (1, 0)), H(GEN, 1))

    @pytest.mark.parametrize("r", A2.roots)
    def test_quadratic_pairing_growth(self, r):
        al = root(A2, r)
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                L, seq = H(A2, i), []
                for _ in range(11):
                    seq.append(pairing(L, h_(A2, j)))
                    L = kac_translate(A2, al, L)
                d2 = {seq[k + 2] - 2 * seq[k + 1] + seq[k] for k in range(len(seq) - 2)}
                assert len(d2) == 1

    @pytest.mark.parametrize("r", A2.roots)
    def test_translation_word_matches_formula(self, r):
        w = translation_word(A2, r)
        for v in divisor_basis(A2):
            assert apply_word_lattice(A2, w, v) == kac_translate(A2, root(A2, r), v)


def test_root_index_string():
    assert str(RootIndex(2, -1)) == "s2.-1"
    assert parse_word("s2 pi iota r0 r1") == (RootIndex(2, 0), "pi", "iota", "r0", "r1")
