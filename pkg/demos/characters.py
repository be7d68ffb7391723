"""Specialized tau-functions through Schur functions of 3-cores: residuals of
the bilinear relations for a handful of (nu, kappa), at three truncations."""

from fractions import Fraction

import mpmath

from weyltrop.characters import QContext, lambda_of_nu, verify_bilinear

cells = [((0, 0, 0), 1, 0), ((1, 0, -1), 2, 1), ((2, -1, 0), 3, -1)]
for nu, i, kappa in cells:
    print(f"nu={nu} lambda={lambda_of_nu(nu, 3)} i={i} kappa={kappa}")
    for T in (8, 16, None):
        ctx = QContext(Fraction(1, 2), Fraction(3, 4), T=T)
        print(f"    T={ctx.T:4d} residual {mpmath.nstr(verify_bilinear(ctx, 3, nu, i, kappa), 3)}")
