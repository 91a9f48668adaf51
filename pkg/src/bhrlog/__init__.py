"""Numerical certification toolkit for power-weighted Birman-Hardy-Rellich
integral inequalities with iterated-logarithm refinements: exact rational
constants, composite weight evaluation, smooth test-function jets, adaptive
tanh-sinh quadrature, inequality/identity verification, and sharpness sweeps
for the leading constant."""

from .constants import (
    Alpha,
    CoefficientTable,
    characteristic_roots,
    constant_A,
    constant_A_tilde,
    constant_B,
    expand_characteristic,
)
from .params import ParamError, ProblemParams, parse_rational
from .quadrature import QuadResult, QuadratureError, integrate, integrate_exterior
from .sharpness import (
    RateFitError,
    SharpnessSweep,
    rate_fit,
    run_sweep,
    sharpness_integrals,
    sharpness_ratio,
)
from .testfunctions import (
    ExtremizerFamily,
    JetFunction,
    VectorJetFunction,
    bump,
    default_corpus,
    descending_step,
    dilate,
    extremizer,
    product,
    smooth_step,
    vector_function,
    zero_function,
)
from .verifier import (
    VerificationError,
    VerificationReport,
    check_ibp_identity,
    check_poincare,
    check_transform_identity,
    verify_inequality,
    verify_vector,
)
from .weights import (
    LSeriesSum,
    WeightSpec,
    iter_exp,
    iter_ln,
    l_series_tail,
    log_identity_check,
    norm_L,
    weight_term_labels,
    weight_terms_array,
    weight_value,
)

__version__ = "0.1.0"

__all__ = [
    "Alpha", "CoefficientTable", "characteristic_roots", "constant_A",
    "constant_A_tilde", "constant_B", "expand_characteristic",
    "ParamError", "ProblemParams", "parse_rational",
    "QuadResult", "QuadratureError", "integrate", "integrate_exterior",
    "RateFitError", "SharpnessSweep", "rate_fit", "run_sweep",
    "sharpness_integrals", "sharpness_ratio",
    "ExtremizerFamily", "JetFunction", "VectorJetFunction", "bump",
    "default_corpus", "descending_step", "dilate", "extremizer", "product", "smooth_step",
    "vector_function", "zero_function",
    "VerificationError", "VerificationReport", "check_ibp_identity",
    "check_poincare", "check_transform_identity", "verify_inequality",
    "verify_vector",
    "LSeriesSum", "WeightSpec", "iter_exp", "iter_ln", "l_series_tail",
    "log_identity_check", "norm_L", "weight_term_labels", "weight_terms_array",
    "weight_value",
    "__version__",
]
