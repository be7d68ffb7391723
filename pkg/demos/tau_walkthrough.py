"""Walk a few steps of the Weyl orbit of E_1^1 on affine A_2 and print the
tau-values, their Laurent status and the normalized Phi polynomials."""

from weyltrop import ParamSystem, ShapeConfig, TauEngine, phi_from_tau
from weyltrop.tau import check_normalization

cfg = ShapeConfig.A(3)
engine = TauEngine(ParamSystem.generic(cfg), marked=True)
for el in engine.run(2):
    if el.base != (1, 1):
        continue
    np_ = phi_from_tau(engine, el)
    word = " ".join(f"s{g.n}.{g.i}" for g in el.witness) or "()"
    print(f"{word:12} {el.divisor}")
    print(f"    Phi = {np_.poly}")
    print(f"    degree {list(el.divisor.hCoeffs)}, normalized: {check_normalization(np_)}")
