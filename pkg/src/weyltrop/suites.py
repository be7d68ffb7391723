"""Verification suites returning one record per check.

Each suite yields :class:`CheckRecord` values; callers decide how to report
them.  Records are deterministic for a fixed seed (timings are kept apart).
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .algebra import expr_equals
from .birational import Frame, ParamSystem, TropicalMap, apply_word, random_point
from .errors import WeylTropError
from .lattice import (
    ShapeConfig,
    apply_word_lattice,
    cartan_entry,
    curve_basis,
    divisor_basis,
    format_word,
    invariant_classes,
    pairing,
)


@dataclass
class CheckRecord:
    check: str
    instance: str
    status: str
    witness: str = ""
    elapsed: float = field(default=0.0, compare=False)

    def as_dict(self, timings: bool = False) -> dict:
        d = {"check": self.check, "instance": self.instance, "status": self.status, "witness": self.witness}
        if timings:
            d["elapsed"] = round(self.elapsed, 4)
        return d

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _record(check, instance, fn) -> CheckRecord:
    t = time.perf_counter()
    try:
        res = fn()
        ok, witness = res if isinstance(res, tuple) else (res, "")
        status = "pass" if ok else "fail"
    except WeylTropError as exc:
        status, witness = "fail", f"{type(exc).__name__}: {exc}"
    return CheckRecord(check, instance, status, str(witness), time.perf_counter() - t)


def relation_words(cfg: ShapeConfig, gens) -> list:
    """``(label, w1, w2)`` for squares, braids and commutations among ``gens``."""
    out = []
    gens = [cfg.root_index(*g) for g in gens]
    for a in gens:
        out.append((f"{a}^2", (a, a), ()))
    for a, b in itertools.combinations(gens, 2):
        c, c2 = cartan_entry(cfg, a, b), cartan_entry(cfg, b, a)
        if c == c2 == 0:
            out.append((f"{a}{b}=ba", (a, b), (b, a)))
        elif c == c2 == -1:
            out.append((f"{a}{b}{a}=bab", (a, b, a), (b, a, b)))
    return out


# ---------------------------------------------------------------------------
# lattice


def lattice_suite(cfg: ShapeConfig, n_words: int = 200, max_len: int = 12, seed: int = 0, gens=None):
    gens = tuple(cfg.roots if gens is None else gens)
    basis = divisor_basis(cfg) + curve_basis(cfg)
    label = cfg.label()

    def rel(w1, w2):
        for v in basis:
            if apply_word_lattice(cfg, w1, v) != apply_word_lattice(cfg, w2, v):
                return False, f"differs on {v}"
        return True

    for name, w1, w2 in relation_words(cfg, gens):
        yield _record("lattice.relation", f"{label} {name}", lambda: rel(w1, w2))

    d, dc = invariant_classes(cfg)[:2]
    dbasis, cbasis = divisor_basis(cfg), curve_basis(cfg)
    rng = random.Random(seed)

    def invariance(w):
        if apply_word_lattice(cfg, w, d) != d:
            return False, "w(delta) != delta"
        if apply_word_lattice(cfg, w, dc) != dc:
            return False, "w(delta_check) != delta_check"
        wd = [apply_word_lattice(cfg, w, x) for x in dbasis]
        wc = [apply_word_lattice(cfg, w, x) for x in cbasis]
        for (x, y), (X, Y) in zip(itertools.product(dbasis, cbasis), itertools.product(wd, wc)):
            if pairing(x, y) != pairing(X, Y):
                return False, f"pairing changed on {x}, {y}"
        return True

    for k in range(n_words):
        w = tuple(rng.choice(gens) for _ in range(rng.randint(1, max_len)))
        yield _record("lattice.invariance", f"{label} word#{k} {format_word(w)}", lambda: invariance(w))


# ---------------------------------------------------------------------------
# birational frames


def same_action(state, frame: Frame, w1, w2, omega_form: bool = False):
    s1, e1 = apply_word(state, frame, w1, omega_form=omega_form)
    s2, e2 = apply_word(state, frame, w2, omega_form=omega_form)
    if s1 != s2:
        return False, "parameter images differ"
    for v in frame.variables:
        if not expr_equals(e1[v], e2[v]):
            return False, f"images of {v} differ"
    return True


def frame_suite(system, frames=None, gens=None, frozen=frozenset()):
    """Generator relations in each frame; ``frames`` holds ``(kind, marked, omega_form)``."""
    cfg = system.cfg
    gens = tuple(system.generators if gens is None else gens)
    frames = frames or [("f", False, False), ("f", False, True), ("x", False, False), ("tau", False, False),
                        ("tau", True, False)]
    st = system.initial()
    label = cfg.label()
    for kind, marked, om in frames:
        fr = Frame(cfg, kind, marked, frozenset(frozen) if kind == "tau" else frozenset())
        tag = kind + ("+marked" if marked else "") + ("+omega" if om else "") + ("+frozen" if frozen and kind == "tau" else "")
        for name, w1, w2 in relation_words(cfg, gens):
            yield _record(f"frame.{kind}", f"{label} {tag} {name}", lambda: same_action(st, fr, w1, w2, om))


def extended_a_suite(N: int):
    """Relations of the extended A-type group in the f and tau frames."""
    from .painleve import AffineConfigA
    from .lattice import RootIndex

    A = AffineConfigA(N)
    st = A.initial()
    s = lambda n: RootIndex((n - 1) % N + 1, 0)  # noqa: E731
    pinv = ("pi",) * (N - 1)
    words = [
        ("pi^N", ("pi",) * N, ()),
        ("iota^2", ("iota", "iota"), ()),
        ("r1^2", ("r1", "r1"), ()),
        ("r0^2", ("r0", "r0"), ()),
        ("iota r1 iota = r0", ("iota", "r1", "iota"), ("r0",)),
        ("pi r1 = r1 pi", ("pi", "r1"), ("r1", "pi")),
        ("iota pi = pi iota", ("iota", "pi"), ("pi", "iota")),
    ]
    for n in range(1, N + 1):
        words.append((f"pi s{n} pi^-1 = s{n + 1}", ("pi", s(n)) + pinv, (s(n + 1),)))
        words.append((f"iota s{n} = s{n} iota", ("iota", s(n)), (s(n), "iota")))
    words.append(("r1 s1 = s1 r1", ("r1", s(1)), (s(1), "r1")))
    for kind in ("f", "tau"):
        fr = Frame(A.cfg, kind)
        for name, w1, w2 in words:
            yield _record(f"extended.{kind}", f"A{N - 1} {name}", lambda: same_action(st, fr, w1, w2))

    def shifts(m):
        q = A.q()
        st2 = st
        for g in ("r0", "r1") * m:
            st2 = st2.act_generator(g)
        ok = st2.values["b0"] == st.values["b0"] * q ** (2 * m) and st2.values["b1"] == st.values["b1"] * q ** (-2 * m)
        return ok, str(st2)

    for m in (1, 2, 3):
        yield _record("extended.params", f"A{N - 1} (r0 r1)^{m} b-shift", lambda: shifts(m))


# ---------------------------------------------------------------------------
# min-plus


def tropical_suite(system, n_points: int = 1000, seed: int = 0, kind: str = "f", gens=None):
    cfg = system.cfg
    gens = tuple(system.generators if gens is None else gens)
    st = system.initial()
    fr = Frame(cfg, kind)
    names = list(fr.variables) + sorted(st.values)
    rng = random.Random(seed)
    points = [random_point(names, rng) for _ in range(n_points)]
    label = cfg.label()

    maps = {g: TropicalMap(st, cfg.root_index(*g), fr) for g in gens}

    def push(p, w):
        for g in w:
            p = maps[(g.n, g.i)](p)
        return p

    for name, w1, w2 in relation_words(cfg, gens):
        def check(w1=w1, w2=w2):
            for p in points:
                if push(p, w1) != push(p, w2):
                    return False, f"differs at {p}"
            return True

        yield _record("tropical", f"{label} {name} on {n_points} points", check)


# ---------------------------------------------------------------------------
# tau certificate


def tau_certificate_suite(system, max_len: int, frozen=frozenset(), gens=None):
    from .tau import TauEngine, check_normalization, phi_from_tau

    eng = TauEngine(system, frozen, marked=True, generators=gens)
    els = eng.run(max_len)
    failed = {id(x) for x in eng.failures}
    label = system.cfg.label()
    for el in els:
        def check(el=el):
            if id(el) in failed:
                return False, "tau is not Laurent"
            np_ = phi_from_tau(eng, el)
            if np_.zeta_degrees() != {el.divisor.hCoeffs}:
                return False, f"zeta degrees {sorted(np_.zeta_degrees())} != {el.divisor.hCoeffs}"
            if not check_normalization(np_):
                return False, "normalization fails"
            return True

        yield _record("tau.certificate", f"{label} {el.divisor} len={len(el.witness)}", check)


def shape_systems(cfg: ShapeConfig):
    """Parameter systems to exercise for a shape: the generic one, plus the
    frozen-node system for D-type presets."""
    out = [("generic", ParamSystem.generic(cfg), frozenset(), None)]
    if cfg.name.startswith("d"):
        from .painleve import build_D

        D, gens = build_D(cfg.N)
        out.append(("frozen", D.system, D.frozen, gens))
    return out


def summarize(records) -> tuple:
    records = list(records)
    return sum(r.ok for r in records), len(records)


__all__ = [
    "CheckRecord",
    "relation_words",
    "lattice_suite",
    "same_action",
    "frame_suite",
    "extended_a_suite",
    "tropical_suite",
    "tau_certificate_suite",
    "shape_systems",
    "summarize",
]
