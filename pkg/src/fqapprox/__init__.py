"""Exact Diophantine approximation over F_q((1/T))."""
from .algebra import (
    NEG_INF,
    FieldElement,
    FieldSpec,
    Poly,
    field,
    field_arithmetic,
    norm_deg,
    parse_poly,
    poly_divmod,
    poly_gcd,
    poly_xgcd,
)
from .contfrac import CFExpansion, cf_eval, cf_expand, cf_identity_report, omega_profile
from .errors import *  # noqa: F401,F403
from .exponents import ExponentProfile, mu_profile, omega_profile_matrix, predicted_exponents
from .inhomog import (
    LinearFormPair,
    cassels_pair,
    cassels_reduce,
    dirichlet_solutions,
    inhom_solutions,
    minkowski_inhom,
    monic_solutions,
    sharp_instance,
)
from .kernels import BACKEND
from .laurent import (
    Laurent,
    Vec2Laurent,
    from_rational,
    laurent_arith,
    laurent_inv,
    parse_series,
    random_series,
    split_integral_fractional,
)
from .orbit import Mat2, brute_orbit, gamma_irrational, gamma_rational, normalize_pair

__version__ = "0.1.0"
