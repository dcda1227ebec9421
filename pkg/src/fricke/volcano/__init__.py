"""CM-volcano route to Fricke polynomials modulo primes."""

from .classpoly import ClassPolynomial, load_classpoly, parse_classpoly
from .ec import Curve
from .pipeline import (
    DegenerateSite,
    Isogeny,
    Site,
    VolcanoParams,
    compute_numerators_mod,
    compute_poly_mod,
    crt_assemble,
    curve_with_cardinality,
    find_volcano_prime,
    params_for_prime,
    numerator_system,
    partial_volcano,
    power_sum_coefficients_mod,
    random_l_torsion_point,
    site_power_sums,
    velu_isogenous_curve,
    volcano_primes,
)
from .polyroots import roots_mod_p

__all__ = [
    "ClassPolynomial",
    "Curve",
    "DegenerateSite",
    "Isogeny",
    "Site",
    "VolcanoParams",
    "compute_numerators_mod",
    "compute_poly_mod",
    "crt_assemble",
    "curve_with_cardinality",
    "find_volcano_prime",
    "params_for_prime",
    "load_classpoly",
    "numerator_system",
    "parse_classpoly",
    "partial_volcano",
    "power_sum_coefficients_mod",
    "random_l_torsion_point",
    "roots_mod_p",
    "site_power_sums",
    "velu_isogenous_curve",
    "volcano_primes",
]
