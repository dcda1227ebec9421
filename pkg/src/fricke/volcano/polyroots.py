"""Roots in GF(p) of integer polynomials, via sympy's finite-field factoring."""

from __future__ import annotations

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_from_int_poly, gf_gcd, gf_monic, gf_pow_mod, gf_sub, gf_zassenhaus


def roots_mod_p(coeffs, p: int):
    """Sorted distinct roots in GF(p); ``coeffs`` run from the leading term to the constant."""
    f = gf_from_int_poly([int(c) for c in coeffs], p)
    if not f:
        raise ValueError("zero polynomial")
    if len(f) == 1:
        return []
    _, f = gf_monic(f, p, ZZ)
    # split off the product of the distinct linear factors: gcd(f, x^p - x)
    xp = gf_pow_mod([1, 0], p, f, p, ZZ)
    g = gf_gcd(f, gf_sub(xp, [1, 0], p, ZZ), p, ZZ)
    if len(g) <= 1:
        return []
    if len(g) == 2:
        return [int(-g[1]) % p]
    roots = [int(-h[1]) % p for h in gf_zassenhaus(g, p, ZZ)]
    return sorted(roots)
