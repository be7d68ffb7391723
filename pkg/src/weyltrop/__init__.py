"""Subtraction-free birational Weyl group actions, tau functions, q-Painleve maps
and character specializations, computed exactly."""

from .algebra import (
    LaurentPoly,
    Monomial,
    RationalExpression,
    UniFrac,
    evaluate_univariate,
    exact_divide,
    expr_arith,
    expr_equals,
    param,
    poly_arith,
    reduced_degree_in,
    specialize_numeric,
    substitute,
    var,
)
from .birational import (
    Frame,
    ParamState,
    ParamSystem,
    TropicalMap,
    act,
    act_f,
    act_tau,
    act_x,
    apply_word,
    generator_images,
    tropical_step,
    ultradiscrete_eval,
)
from .characters import (
    MayaDiagram,
    QContext,
    conjugate,
    elliptic_gamma,
    hook_lengths,
    is_n_core,
    lambda_of_nu,
    pochhammer1,
    pochhammer2,
    schur,
    sigma,
    universal_character,
    verify_bilinear,
)
from .errors import WeylTropError
from .lattice import (
    CurveClass,
    DivisorClass,
    RootIndex,
    ShapeConfig,
    apply_word_lattice,
    cartan_entry,
    cartan_matrix,
    coroot,
    invariant_classes,
    kac_translate,
    pairing,
    parse_word,
    reflect,
    root,
    translation_word,
)
from .painleve import (
    AffineConfigA,
    AffineConfigD,
    NuKappa,
    build_D,
    conserved_quantities_D,
    degree_growth_table,
    divisor_of,
    nu_kappa_of,
    qpA_step,
    translations_A,
)
from .tau import (
    OrbitElement,
    TauEngine,
    check_claim_transform,
    check_normalization,
    enumerate_orbit,
    laurent_certificate,
    phi_from_tau,
    tau_of,
)

__version__ = "0.1.0"

__all__ = [
    "LaurentPoly",
    "Monomial",
    "RationalExpression",
    "UniFrac",
    "evaluate_univariate",
    "exact_divide",
    "expr_arith",
    "expr_equals",
    "param",
    "poly_arith",
    "reduced_degree_in",
    "specialize_numeric",
    "substitute",
    "var",
    "Frame",
    "ParamState",
    "ParamSystem",
    "TropicalMap",
    "act",
    "act_f",
    "act_tau",
    "act_x",
    "apply_word",
    "generator_images",
    "tropical_step",
    "ultradiscrete_eval",
    "MayaDiagram",
    "QContext",
    "conjugate",
    "elliptic_gamma",
    "hook_lengths",
    "is_n_core",
    "lambda_of_nu",
    "pochhammer1",
    "pochhammer2",
    "schur",
    "sigma",
    "universal_character",
    "verify_bilinear",
    "WeylTropError",
    "CurveClass",
    "DivisorClass",
    "RootIndex",
    "ShapeConfig",
    "apply_word_lattice",
    "cartan_entry",
    "cartan_matrix",
    "coroot",
    "invariant_classes",
    "kac_translate",
    "pairing",
    "parse_word",
    "reflect",
    "root",
    "translation_word",
    "AffineConfigA",
    "AffineConfigD",
    "NuKappa",
    "build_D",
    "conserved_quantities_D",
    "degree_growth_table",
    "divisor_of",
    "nu_kappa_of",
    "qpA_step",
    "translations_A",
    "OrbitElement",
    "TauEngine",
    "check_claim_transform",
    "check_normalization",
    "enumerate_orbit",
    "laurent_certificate",
    "phi_from_tau",
    "tau_of",
    "__version__",
]
