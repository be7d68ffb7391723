"""Command-line entry point.

Reports are JSON lines, one record per check, sorted by check id (stable
within a check).  Tables are CSV.  Exit status: 0 all checks pass, 1 some
check failed, 2 bad configuration.

Generator tokens: ``s<n>.<i>`` (simple reflection in the root indexed by
``(n, i)``; ``s<n>`` is short for ``s<n>.0``), and for A-type presets the
extra generators ``pi``, ``iota``, ``r0``, ``r1``.  Words are written left to
right and read as group elements, so the rightmost token acts first on
lattice classes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .algebra import RationalExpression
from .errors import BadShape, IndexOutOfRange, NonConvergent, UnknownGenerator, WeylTropError
from .lattice import E, ShapeConfig, apply_word_lattice, format_word, parse_word

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _ints(text):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in str(text).replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"expected a list of integers, got {text!r}") from None


def _rational(text):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a rational number, got {text!r}") from None


def _rationals(text):
    if text is None:
        return None
    return tuple(_rational(x) for x in str(text).replace(",", " ").split())


def shape_from_args(args) -> ShapeConfig:
    if args.preset:
        if args.N is not None or args.k is not None or args.l is not None:
            raise ConfigError("--preset cannot be combined with --N/--k/--l")
        return ShapeConfig.preset(args.preset)
    if args.N is None:
        raise ConfigError("give --preset or --N")
    k = _ints(args.k) or (1,) * args.N
    ll = _ints(args.l) or (1,) * args.N
    return ShapeConfig(args.N, k, ll)


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use flag spelling."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def threads() -> int:
    raw = os.environ.get("WEYLTROP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"WEYLTROP_THREADS must be an integer, got {raw!r}") from None


# ---------------------------------------------------------------------------
# output


def _open_out(args):
    if args.out:
        return open(args.out, "w", newline="")
    return sys.stdout


def emit_records(records, args) -> int:
    records = sorted(records, key=lambda r: r.check)
    fh = _open_out(args)
    try:
        for r in records:
            fh.write(json.dumps(r.as_dict(timings=args.timings), sort_keys=True) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if all(r.ok for r in records) else EXIT_FAIL


def emit_rows(rows, args):
    fh = _open_out(args)
    try:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def run_suites(suites) -> list:
    """Run independent suite generators, keeping submission order."""
    n = threads()
    if n == 1:
        return [r for s in suites for r in s]
    with ThreadPoolExecutor(max_workers=n) as pool:
        parts = list(pool.map(list, suites))
    return [r for p in parts for r in p]


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify_relations(args) -> int:
    from .birational import ParamSystem
    from .suites import extended_a_suite, frame_suite, lattice_suite, shape_systems, tropical_suite

    cfg = shape_from_args(args)
    suites = [lattice_suite(cfg, n_words=args.words, max_len=args.max_word_len, seed=args.seed)]
    for _, system, frozen, gens in shape_systems(cfg):
        suites.append(frame_suite(system, gens=gens, frozen=frozen))
    if cfg.name and cfg.name.startswith("a"):
        suites.append(extended_a_suite(cfg.N))
    if args.points:
        suites.append(tropical_suite(ParamSystem.generic(cfg), n_points=args.points, seed=args.seed))
    return emit_records(run_suites(suites), args)


def _engine_for(cfg, word):
    """Marked engine for plain words; the extended A engine otherwise."""
    from .birational import ParamSystem
    from .tau import TauEngine

    extended = any(not isinstance(g, tuple) for g in word)
    if not extended:
        return TauEngine(ParamSystem.generic(cfg), marked=True), None
    if not (cfg.name and cfg.name.startswith("a")):
        raise UnknownGenerator("pi, iota, r0, r1 exist only for A-type presets")
    from .characters import a_engine
    from .painleve import lattice_act_A

    return a_engine(cfg.N), (lambda g, v: lattice_act_A(cfg, g, v))


def cmd_tau(args) -> int:
    from .suites import CheckRecord
    from .tau import OrbitElement, check_normalization, multiplicities, phi_from_tau

    cfg = shape_from_args(args)
    word = parse_word(args.word or "")
    base = _ints(args.base)
    if base is None or len(base) != 2 or tuple(base) not in cfg.eindex:
        raise ConfigError(f"--base must name an exceptional class n,i of {cfg.label()}")
    eng, act = _engine_for(cfg, word)
    divisor = apply_word_lattice(cfg, word, E(cfg, *base), act)
    el = OrbitElement(divisor, word, tuple(base))
    inst = f"{cfg.label()} {format_word(word) or '()'} . E{base[0]}^{base[1]} = {divisor}"
    value = eng.ensure(el)
    laurent = value.to_laurent() if isinstance(value, RationalExpression) else value
    if laurent is None:
        records = [CheckRecord("tau.laurent", inst, "fail", str(value))]
    else:
        records = [CheckRecord("tau.laurent", inst, "pass", str(eng.plain(laurent)))]
    mu = {f"{n},{i}": x for (n, i), x in sorted(multiplicities(divisor).items()) if x}
    if not eng.frame.marked:
        records.append(CheckRecord("tau.phi", inst, "skip", "extended generators use the unmarked frame"))
    elif laurent is None:
        records.append(CheckRecord("tau.phi", inst, "fail", "tau is not Laurent"))
    else:
        try:
            np_ = phi_from_tau(eng, el)
            deg_ok = np_.zeta_degrees() <= {divisor.hCoeffs}
            records.append(CheckRecord("tau.phi", inst, "pass" if deg_ok else "fail",
                                       f"Phi = {np_.poly}; degree {list(np_.degree)}; mu {json.dumps(mu)}"))
            norm = check_normalization(np_)
            records.append(CheckRecord("tau.normalization", inst, "pass" if norm else "fail"))
        except WeylTropError as exc:
            records.append(CheckRecord("tau.phi", inst, "fail", f"{type(exc).__name__}: {exc}"))
    return emit_records(records, args)


def cmd_orbit(args) -> int:
    from .tau import enumerate_orbit

    cfg = shape_from_args(args)
    gens, act, A = None, None, None
    if cfg.name and cfg.name.startswith("a"):
        from .painleve import AffineConfigA, lattice_act_A

        A = AffineConfigA(cfg.N)
        if args.extended:
            gens = A.generators
            act = lambda g, v: lattice_act_A(cfg, g, v)  # noqa: E731
    elif args.extended:
        raise ConfigError("--extended needs an A-type preset")
    rows = []
    for el in enumerate_orbit(cfg, args.max_word_len, generators=gens, lattice_act=act):
        row = {"divisor": str(el.divisor), "h": list(el.divisor.hCoeffs),
               "e": {f"{n},{i}": x for (n, i), x in sorted(el.divisor.eCoeffs.items()) if x},
               "witness": format_word(el.witness), "length": len(el.witness), "base": list(el.base)}
        if A is not None:
            from .painleve import nu_kappa_of

            nk = nu_kappa_of(A, el.divisor)
            row["nu"], row["kappa"] = list(nk.nu), nk.kappa
        rows.append(row)
    rows.sort(key=lambda r: (r["length"], r["divisor"]))
    emit_rows(rows, args)
    return EXIT_OK


def _degree_setup(cfg, args):
    """``(state, word, act)`` for the requested dynamics."""
    from .painleve import QPA_WORD, AffineConfigA, build_D, d_null_pair, lattice_act_A

    if cfg.name and cfg.name.startswith("a"):
        A = AffineConfigA(cfg.N)
        word = parse_word(args.word) if args.word else QPA_WORD
        return A.initial(), word, (lambda g, v: lattice_act_A(cfg, g, v))
    if cfg.name and cfg.name.startswith("d"):
        from .lattice import translation_word

        D, gens = build_D(cfg.N)
        if args.word:
            word = parse_word(args.word)
        else:
            root = parse_word(args.root or "s1.0")
            if len(root) != 1 or root[0] not in gens:
                raise ConfigError(f"--root must be one of {format_word(gens)}")
            word = translation_word(D.cfg, root[0], d_null_pair(D), gens)
        return D.system.initial(), word, None
    raise BadShape("degree-growth needs an affine preset (aR or dN)")


def cmd_degree_growth(args) -> int:
    from .painleve import degree_growth_table, second_differences

    cfg = shape_from_args(args)
    state, word, act = _degree_setup(cfg, args)
    free = args.free
    if free not in {f"f{n}" for n in range(1, cfg.N + 1)}:
        raise ConfigError(f"--free must be one of f1..f{cfg.N}")
    rows = degree_growth_table(state, word, args.iters, free, seed=args.seed, act=act)
    N = cfg.N
    d2 = [second_differences([r.degrees[i] for r in rows]) for i in range(N)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n"] + [f"deg_f{i}" for i in range(1, N + 1)] + [f"d2_f{i}" for i in range(1, N + 1)]
               + [f"bound_f{i}" for i in range(1, N + 1)])
    ok = True
    for r in rows:
        diffs = [d2[i][r.n - 2] if r.n >= 2 else "" for i in range(N)]
        w.writerow([r.n, *r.degrees, *diffs, *r.bounds])
        ok &= all(a <= b for a, b in zip(r.degrees, r.bounds))
    fh = _open_out(args)
    try:
        fh.write(buf.getvalue())
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qp_step(args) -> int:
    import mpmath

    from .algebra import evaluate_mp
    from .painleve import AffineConfigA, qpA_step

    cfg = shape_from_args(args)
    if not (cfg.name and cfg.name.startswith("a")):
        raise ConfigError("qp-step needs an A-type preset")
    N = cfg.N
    A = AffineConfigA(N)
    mpmath.mp.prec = args.precision
    a = _rationals(args.a) or tuple(Fraction(n + 1, n) for n in range(1, N))
    f = _rationals(args.f) or tuple(Fraction(n + 1, 2) for n in range(1, N + 1))
    if len(a) != N - 1 or len(f) != N:
        raise ConfigError(f"--a needs {N - 1} values and --f needs {N}")
    b0, b1 = _rational(args.b0), _rational(args.b1 if args.b1 is not None else Fraction(1, 2) / _rational(args.b0))
    if min(a + f + (b0, b1)) <= 0:
        raise ConfigError("parameters and initial values must be positive")
    params = {f"a{n}": mpmath.mpf(x.numerator) / x.denominator for n, x in enumerate(a, 1)}
    params["b0"], params["b1"] = mpmath.mpf(b0.numerator) / b0.denominator, mpmath.mpf(b1.numerator) / b1.denominator
    vals = {f"f{n}": mpmath.mpf(x.numerator) / x.denominator for n, x in enumerate(f, 1)}
    state = A.initial()
    digits = max(10, int(args.precision * 0.3))
    rows = []

    def row(n, st):
        out = {"n": n, "f": [mpmath.nstr(vals[f"f{i}"], digits) for i in range(1, N + 1)]}
        out["b0"] = mpmath.nstr(evaluate_mp(st.b(0), params, {}), digits)
        out["b1"] = mpmath.nstr(evaluate_mp(st.b(1), params, {}), digits)
        if args.symbolic:
            out["state"] = str(st)
        return out

    rows.append(row(0, state))
    for n in range(1, args.iters + 1):
        new_state, imgs = qpA_step(state)
        if args.symbolic and n == 1:
            rows[0]["images"] = {k: str(v) for k, v in sorted(imgs.items())}
        vals = {k: evaluate_mp(v, params, vals) for k, v in imgs.items()}
        state = new_state
        rows.append(row(n, state))
    emit_rows(rows, args)
    return EXIT_OK


def cmd_char_check(args) -> int:
    import itertools

    from .characters import QContext, _check_even, verify_bilinear
    from .suites import CheckRecord, _record

    N = args.N if args.N is not None else 3
    mode = args.mode or ("uc" if N % 2 == 0 else "schur")
    if mode == "uc":
        _check_even(N)
    elif N < 2:
        raise BadShape("N must be at least 2")
    r = args.grid
    cells = [(nu, kappa, i) for nu in itertools.product(range(-r, r + 1), repeat=N)
             for kappa in range(-r, r + 1) for i in range(1, N + 1)]
    label = lambda nu, kappa, i: f"N={N} {mode} nu={list(nu)} kappa={kappa} i={i}"  # noqa: E731
    try:
        ctx = QContext(_rational(args.q), _rational(args.b0), _rational(args.c), args.precision,
                       tolerance=min(args.tolerance, 1e-20), T=args.T)
    except NonConvergent as exc:
        records = [CheckRecord("char.bilinear", label(*c), "fail", f"NonConvergent: {exc}") for c in cells]
        return emit_records(records, args)

    def check(nu, kappa, i):
        res = verify_bilinear(ctx, N, nu, i, kappa, mode)
        return res < args.tolerance, mpmath_str(res)

    records = [_record("char.bilinear", label(*c), lambda c=c: check(*c)) for c in cells]
    return emit_records(records, args)


def mpmath_str(x) -> str:
    import mpmath

    return mpmath.nstr(x, 3)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="weyltrop",
        description="Tropical Weyl group actions, tau functions, q-Painleve maps and character checks.",
        epilog=__doc__.split("\n\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, shape=True):
        if shape:
            sp.add_argument("--preset", help="named shape: aR (affine A_R) or dN (the D-type shape with N nodes)")
            sp.add_argument("--N", type=int, help="number of nodes of the generic shape")
            sp.add_argument("--k", help="comma-separated k_1..k_N")
            sp.add_argument("--l", help="comma-separated l_1..l_N")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--config", help="file of key=value lines supplying flag defaults")
        sp.add_argument("--timings", action="store_true", help="add elapsed seconds to records")

    sp = sub.add_parser("verify-relations", help="lattice, frame, extended and min-plus relation suites")
    common(sp)
    sp.add_argument("--max-word-len", type=int, default=12)
    sp.add_argument("--words", type=int, default=200, help="random words for the lattice invariance check")
    sp.add_argument("--points", type=int, default=1000, help="random points for the min-plus check (0 skips)")
    sp.set_defaults(func=cmd_verify_relations)

    sp = sub.add_parser("tau", help="tau value, Laurent check, Phi and normalization for one orbit element")
    common(sp)
    sp.add_argument("--word", default="", help='generator word, e.g. "s1.0 s2.0"')
    sp.add_argument("--base", default="1,1", help="seed exceptional class n,i")
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("orbit", help="orbit of the exceptional classes up to a word length")
    common(sp)
    sp.add_argument("--max-word-len", type=int, default=3)
    sp.add_argument("--extended", action="store_true", help="include pi, iota, r0, r1 (A presets)")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("degree-growth", help="CSV of degrees of iterates against the lattice bound")
    common(sp)
    sp.add_argument("--iters", type=int, default=8)
    sp.add_argument("--word", help="word to iterate (default: the q-Painleve step or a translation)")
    sp.add_argument("--root", help="D presets: root whose translation is iterated (default s1.0)")
    sp.add_argument("--free", default="f1", help="variable left free; the others are specialized")
    sp.set_defaults(func=cmd_degree_growth)

    sp = sub.add_parser("qp-step", help="iterate the q-Painleve map numerically")
    common(sp)
    sp.add_argument("--iters", type=int, default=4)
    sp.add_argument("--a", help="a_1..a_{N-1} (a_N follows from the constraint)")
    sp.add_argument("--b0", default="3/4")
    sp.add_argument("--b1", default=None, help="default: q/b0 with q = 1/2")
    sp.add_argument("--f", help="initial f_1..f_N")
    sp.add_argument("--precision", type=int, default=100)
    sp.add_argument("--symbolic", action="store_true", help="also print the symbolic step")
    sp.set_defaults(func=cmd_qp_step)

    sp = sub.add_parser("char-check", help="bilinear relation residuals of the specialized tau functions")
    common(sp, shape=False)
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--mode", choices=("schur", "uc"), help="default: schur for odd N, uc for even N")
    sp.add_argument("--grid", type=int, default=2, help="|nu_i| and |kappa| range")
    sp.add_argument("--q", default="1/2")
    sp.add_argument("--b0", default="3/4")
    sp.add_argument("--c", default="2/3")
    sp.add_argument("--precision", type=int, default=200)
    sp.add_argument("--tolerance", type=float, default=1e-12)
    sp.add_argument("--T", type=int, help="truncation of the infinite products (default from q and tolerance)")
    sp.set_defaults(func=cmd_char_check)
    return p


def parse_args(argv):
    """Parse ``argv``; values from ``--config`` act as defaults that flags override."""
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    args = parser.parse_args(argv)
    if not known.config:
        return args
    values = read_config_file(known.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
        if action.const is True:
            defaults[key] = value.lower() in ("1", "true", "yes")
        elif action.type is not None:
            try:
                defaults[key] = action.type(value)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        return args.func(args)
    except (ConfigError, BadShape, IndexOutOfRange, UnknownGenerator) as exc:
        print(f"weyltrop: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep the interpreter quiet
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
