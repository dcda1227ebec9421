"""The ell-isogenous curve over GF(p) from U_ell alone.

U is read as a polynomial U(kappa, E4, E6) after Delta -> (E4^3 - E6^2)/1728.
At a root kappa (the kernel trace of a rational ell-isogeny), the first and
second partial derivatives give the invariants E4~ = E4(q^ell), E6~ = E6(q^ell)
of the normalised codomain, hence A* = -3 ell^4 E4~ and B* = -2 ell^6 E6~.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .core import TriPoly
from .rings import GF, QQ, Ring
from .volcano.polyroots import roots_mod_p


class DegenerateRoot(ArithmeticError):
    """The partial derivative in kappa vanishes at the root."""


# --------------------------------------------------------------------------
# polynomials in (kappa, E4, E6) as dicts {(i, j, k): c}


def substitute_delta(U: TriPoly, ring: Ring = QQ) -> dict:
    """U as a polynomial in (kappa, E4, E6) over ``ring``."""
    inv = ring.div(ring(1), 1728)
    out: dict = {}
    for (r, a, b, c), v in U.terms.items():
        v = ring(v) * inv ** c
        # (E4^3 - E6^2)^c
        for s in range(c + 1):
            key = (r, a + 3 * (c - s), b + 2 * s)
            term = v * comb(c, s) * (-1) ** s
            out[key] = out.get(key, 0) + term
    return _clean(out, ring)


def _clean(poly: dict, ring: Ring) -> dict:
    return {k: ring(v) for k, v in poly.items() if ring(v)}


def derivative(poly: dict, var: int, ring: Ring = QQ) -> dict:
    """Partial derivative in variable 0 (kappa), 1 (E4) or 2 (E6)."""
    out = {}
    for key, v in poly.items():
        e = key[var]
        if e:
            k = list(key)
            k[var] -= 1
            out[tuple(k)] = v * e
    return _clean(out, ring)


def evaluate(poly: dict, point, ring: Ring):
    x, y, z = point
    total = ring(0)
    for (i, j, k), v in poly.items():
        total += v * x ** i * y ** j * z ** k
    return ring(total)


PARTIAL_NAMES = ("U", "k", "4", "6", "kk", "k4", "k6", "44", "46", "66")


def partial_polynomials(U: TriPoly, ring: Ring = QQ) -> dict:
    """U and all its first and second partial derivatives, keyed by PARTIAL_NAMES."""
    base = substitute_delta(U, ring)
    first = {n: derivative(base, i, ring) for i, n in enumerate("k46")}
    out = {"U": base, "k": first["k"], "4": first["4"], "6": first["6"]}
    for name in ("kk", "k4", "k6", "44", "46", "66"):
        out[name] = derivative(first[name[0]], "k46".index(name[1]), ring)
    return out


@lru_cache(maxsize=32)
def _partials_mod(U: TriPoly, p: int) -> dict:
    return partial_polynomials(U, GF(p))


@dataclass(frozen=True)
class PartialSet:
    """U and its partial derivatives at one point of GF(p)^3."""

    p: int
    U: int
    k: int
    e4: int
    e6: int
    kk: int
    k4: int
    k6: int
    e44: int
    e46: int
    e66: int


def partials_at(U: TriPoly, kappa: int, E4: int, E6: int, p: int) -> PartialSet:
    if 1728 % p == 0:
        raise ValueError("p must be prime to 6")
    ring = GF(p)
    point = (ring(kappa), ring(E4), ring(E6))
    polys = _partials_mod(U, p)
    vals = [evaluate(polys[n], point, ring) for n in PARTIAL_NAMES]
    return PartialSet(p, *vals)


def euler_residual(ell: int, kappa, E4, E6, ps: PartialSet) -> int:
    """(ell + 1) U - (kappa d_k + 2 E4 d_4 + 3 E6 d_6) mod p; zero by homogeneity."""
    return ((ell + 1) * ps.U - (kappa * ps.k + 2 * E4 * ps.e4 + 3 * E6 * ps.e6)) % ps.p


def e4_tilde(ell: int, kappa: int, E4: int, E6: int, ps: PartialSet) -> int:
    p = ps.p
    if ps.k % p == 0:
        raise DegenerateRoot("d_kappa vanishes")
    num = 4 * ell * (3 * E4 * E4 * ps.e6 + 2 * E6 * ps.e4) - ps.k * (ell * ell * E4 + 4 * kappa * kappa)
    return -num * pow(ell ** 4 * ps.k, -1, p) % p


def n_coefficients(ell: int, kappa: int, E4: int, E6: int, ps: PartialSet):
    """(n3, n2, n1, n0) with N = n3 ell^3 + n2 ell^2 + n1 ell + n0."""
    p = ps.p
    dk, d4, d6 = ps.k, ps.e4, ps.e6
    c2 = (18 * (d6 * d6 * ps.kk - 2 * d6 * dk * ps.k6 + ps.e66 * dk * dk) * E4 ** 4
          + (24 * E6 * d4 * (d6 * ps.kk - dk * ps.k6)
             + 24 * E6 * dk * (ps.e46 * dk - d6 * ps.k4)
             + 10 * d4 * dk * dk) * E4 ** 2
          + 3 * dk * dk * (7 * E6 * d6 - kappa * dk) * E4
          + 8 * E6 * E6 * (d4 * d4 * ps.kk - 2 * d4 * dk * ps.k4 + ps.e44 * dk * dk))
    n3 = -E6 * dk ** 3
    n1 = 12 * dk * dk * kappa * (3 * E4 * E4 * d6 + 2 * E6 * d4)
    n0 = -8 * dk ** 3 * kappa ** 3
    return tuple(v % p for v in (n3, c2, n1, n0))


def e6_tilde(ell: int, kappa: int, E4: int, E6: int, ps: PartialSet) -> int:
    p = ps.p
    if ps.k % p == 0:
        raise DegenerateRoot("d_kappa vanishes")
    n3, n2, n1, n0 = n_coefficients(ell, kappa, E4, E6, ps)
    N = ((n3 * ell + n2) * ell + n1) * ell + n0
    return -N * pow(ell ** 6 * ps.k ** 3, -1, p) % p


@dataclass(frozen=True)
class AtkinIsogeny:
    kappa: int
    A_star: int | None
    B_star: int | None
    kappa1: int
    error: str | None = None


def isogenous_from_U(ell: int, curve, U: TriPoly, kappas=None):
    """Codomains of the rational ell-isogenies of y^2 = x^3 + A x + B over GF(p).

    ``curve`` is (A, B, p).  Roots kappa of U(X, E4, E6) are the kernel traces;
    a root where d_kappa vanishes is reported with ``error`` set.
    """
    A, B, p = curve
    if p <= 3:
        raise ValueError("p must exceed 3")
    if (4 * A ** 3 + 27 * B * B) % p == 0:
        raise ValueError("singular curve")
    if A % p == 0 or B % p == 0:
        raise ValueError("j = 0 or 1728 is excluded")
    ring = GF(p)
    E4 = ring.div(-A, 3)
    E6 = ring.div(-B, 2)
    if kappas is None:
        poly = U_at_curve(U, E4, E6, p)
        kappas = roots_mod_p(poly, p)
    out = []
    for kappa in kappas:
        kappa %= p
        ps = partials_at(U, kappa, E4, E6, p)
        try:
            e4t = e4_tilde(ell, kappa, E4, E6, ps)
            e6t = e6_tilde(ell, kappa, E4, E6, ps)
        except DegenerateRoot as exc:
            out.append(AtkinIsogeny(kappa, None, None, kappa, str(exc)))
            continue
        out.append(AtkinIsogeny(kappa, -3 * ell ** 4 * e4t % p, -2 * ell ** 6 * e6t % p, kappa))
    return out


def U_at_curve(U: TriPoly, E4: int, E6: int, p: int):
    """Coefficients of U(X, E4, E6) mod p, leading first."""
    ring = GF(p)
    delta = ring.div(E4 ** 3 - E6 * E6, 1728)
    coeffs = [0] * (U.degree + 1)
    for (r, a, b, c), v in U.terms.items():
        coeffs[r] = (coeffs[r] + v * pow(E4, a, p) * pow(E6, b, p) * pow(delta, c, p)) % p
    return coeffs[::-1]


def exact_partials(U: TriPoly) -> dict:
    """Partial polynomials over QQ, for identity checks."""
    return partial_polynomials(U, QQ)


__all__ = [
    "AtkinIsogeny",
    "DegenerateRoot",
    "PartialSet",
    "U_at_curve",
    "derivative",
    "e4_tilde",
    "e6_tilde",
    "euler_residual",
    "exact_partials",
    "isogenous_from_U",
    "n_coefficients",
    "partial_polynomials",
    "partials_at",
    "substitute_delta",
]
