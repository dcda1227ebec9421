"""Fricke polynomials mod p from the ell-isogenies of CM curves on a volcano crater.

Every root j of the class polynomial H_D mod p gives a curve E with ell + 1
rational ell-isogenies.  Their Velu data (kernel trace, codomain A*, B*) are
the exact roots of U, V, W evaluated at E, so the power sums sigma_t at the h
sites form a linear system for the basis coefficients of each sigma_t.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from ..core import (
    X_WEIGHT,
    ABPoly,
    CrtAccumulator,
    TriPoly,
    is_probable_prime,
    solve_mod_p,
    to_ab_form,
)
from ..formbasis import point_rows, weight_params
from ..fricke_series import _assemble, height_bound
from ..rings import GF, ZZ
from .classpoly import ClassPolynomial, load_classpoly
from .ec import Curve
from .polyroots import roots_mod_p


class DegenerateSite(ArithmeticError):
    """A crater j-invariant is 0 or 1728 mod p, or the curve cannot be identified."""


@dataclass(frozen=True)
class VolcanoParams:
    ell: int
    D: int
    p: int
    t: int
    v: int

    @property
    def order(self) -> int:
        """#E(F_p) for the curves with trace t."""
        return self.p + 1 - self.t


def _volcano_candidate(ell, D, t, v):
    if v % ell == 0:
        return None
    if t % ell != 2 % ell:
        t = -t
        if t % ell != 2 % ell:
            return None
    num = t * t - ell * ell * v * v * D
    if num % 4:
        return None
    p = num // 4
    if p <= 3 or p % ell == 0 or not is_probable_prime(p):
        return None
    return VolcanoParams(ell, D, p, t, v)


def find_volcano_prime(ell: int, D: int, search_range=(1729, 1 << 20)):
    """Smallest p in the range with 4p = t^2 - ell^2 v^2 D, t = 2 mod ell, ell not dividing v."""
    if ell < 3 or D % ell == 0:
        raise ValueError("need an odd prime ell not dividing D")
    lo, hi = search_range
    best = None
    v = 1
    while ell * ell * v * v * -D <= 4 * hi:
        t = 0
        while True:
            cand = _volcano_candidate(ell, D, t, v)
            p = (t * t - ell * ell * v * v * D) // 4
            if p > hi:
                break
            if cand and cand.p >= lo and (best is None or cand.p < best.p):
                best = cand
            t += 1
        v += 1
    if best is None:
        raise ValueError(f"no volcano prime in {search_range}")
    return best


def params_for_prime(ell: int, D: int, p: int) -> VolcanoParams:
    """The (t, v) data of a given volcano prime; ValueError when p does not qualify."""
    v = 1
    while ell * ell * v * v * -D <= 4 * p:
        t2 = 4 * p + ell * ell * v * v * D
        t = math.isqrt(t2)
        if t * t == t2:
            cand = _volcano_candidate(ell, D, t, v)
            if cand:
                return cand
        v += 1
    raise ValueError(f"{p} is not a volcano prime for ell = {ell}, D = {D}")


def volcano_primes(ell: int, D: int, start: int = 1 << 40, v_max: int = 2):
    """Endless supply of volcano primes above ``start``, by increasing trace."""
    t = math.isqrt(4 * start) + 1
    while True:
        for v in range(1, v_max + 1):
            cand = _volcano_candidate(ell, D, t, v)
            if cand and cand.p > start:
                yield cand
        t += 1


def smallest_nonresidue(p: int) -> int:
    c = 2
    while pow(c, (p - 1) // 2, p) == 1:
        c += 1
    return c


def curve_with_cardinality(j: int, m: int, p: int, rng, samples: int = 8) -> Curve:
    """The curve of j-invariant j with exactly m points: (3k, 2k) or its quadratic twist."""
    j %= p
    if j in (0, 1728 % p):
        raise DegenerateSite(f"j = {j}")
    k = j * pow(1728 - j, -1, p) % p
    c = smallest_nonresidue(p)
    base = Curve(3 * k, 2 * k, p)
    twist = Curve(3 * k * c * c, 2 * k * c ** 3, p)
    other = 2 * (p + 1) - m
    for _ in range(16):
        for E in (base, twist):
            pts = [E.random_point(rng) for _ in range(samples)]
            if all(E.mul(m, P) is None for P in pts) and any(E.mul(other, P) is not None for P in pts):
                return E
    raise DegenerateSite(f"could not identify the curve with {m} points for j = {j}")


def random_l_torsion_point(E: Curve, m: int, ell: int, rng):
    """A random point of exact order ell; needs ell | m."""
    if m % ell:
        raise ValueError("ell does not divide the group order")
    cof = m
    while cof % ell == 0:
        cof //= ell
    while True:
        R = E.mul(cof, E.random_point(rng))
        if R is None:
            continue
        nxt = E.mul(ell, R)
        while nxt is not None:
            R, nxt = nxt, E.mul(ell, nxt)
        return R


@dataclass(frozen=True)
class Isogeny:
    """One ell-isogeny out of a site: Velu power sums of the kernel abscissas and the codomain."""

    kernel: frozenset
    kappa: tuple  # (kappa_0, kappa_1, kappa_2, kappa_3)
    codomain: tuple  # (A*, B*)
    on_crater: bool = False

    @property
    def kernel_trace(self) -> int:
        return self.kappa[1]

    def root(self, family: str) -> int:
        return {"U": self.kappa[1], "V": self.codomain[0], "W": self.codomain[1]}[family]


def kernel_abscissas(E: Curve, Q, ell: int):
    xs, R = [], Q
    for _ in range((ell - 1) // 2):
        xs.append(R[0])
        R = E.add(R, Q)
    return xs


def velu_isogenous_curve(E: Curve, Q, ell: int) -> Isogeny:
    p = E.p
    xs = kernel_abscissas(E, Q, ell)
    k0 = len(xs) % p
    k1 = sum(xs) % p
    k2 = sum(x * x for x in xs) % p
    k3 = sum(x * x * x for x in xs) % p
    A = (E.A - 5 * (6 * k2 + 2 * E.A * k0)) % p
    B = (E.B - 7 * (10 * k3 + 6 * E.A * k1 + 4 * E.B * k0)) % p
    return Isogeny(frozenset(xs), (k0, k1, k2, k3), (A, B))


@dataclass
class Site:
    curve: Curve
    isogenies: list = field(default_factory=list)

    @property
    def j(self) -> int:
        return self.curve.j

    def modular_values(self):
        """(E4, E6, Delta) at the site, from A = -3 E4, B = -2 E6."""
        p = self.curve.p
        e4 = -self.curve.A * pow(3, -1, p) % p
        e6 = -self.curve.B * pow(2, -1, p) % p
        delta = (pow(e4, 3, p) - e6 * e6) * pow(1728, -1, p) % p
        return e4, e6, delta


def site_isogenies(E: Curve, params: VolcanoParams, rng, crater=frozenset()):
    """All ell + 1 isogenies out of E, deduplicated by kernel."""
    ell, m = params.ell, params.order
    Q1 = random_l_torsion_point(E, m, ell, rng)
    seen = frozenset(kernel_abscissas(E, Q1, ell))
    while True:
        Q2 = random_l_torsion_point(E, m, ell, rng)
        if frozenset(kernel_abscissas(E, Q2, ell)) != seen:
            break
    gens = [Q1] + [E.add(Q2, E.mul(k, Q1)) for k in range(ell)]
    out = {}
    for Q in gens:
        iso = velu_isogenous_curve(E, Q, ell)
        if iso.kernel in out:
            raise DegenerateSite("repeated kernel")
        j_star = Curve(*iso.codomain, E.p).j
        out[iso.kernel] = Isogeny(iso.kernel, iso.kappa, iso.codomain, j_star in crater)
    return list(out.values())


_SITE_CACHE: dict = {}


def partial_volcano(params: VolcanoParams, H: ClassPolynomial, seed: int = 0):
    """The crater sites for (ell, D, p) with their ell + 1 isogenies; cached."""
    if H.D != params.D:
        raise ValueError("class polynomial does not match the discriminant")
    if H.h < params.ell + 2:
        raise ValueError(f"class number {H.h} is below ell + 2")
    key = (params.ell, params.D, params.p)
    if key in _SITE_CACHE:
        return _SITE_CACHE[key]
    p = params.p
    rng = random.Random(seed ^ p)
    js = roots_mod_p(H.coeffs, p)
    if len(js) != H.h:
        raise DegenerateSite(f"H_D has {len(js)} roots mod {p}, expected {H.h}")
    crater = frozenset(js)
    sites = []
    for j in js:
        E = curve_with_cardinality(j, params.order, p, rng)
        sites.append(Site(E, site_isogenies(E, params, rng, crater)))
    _SITE_CACHE[key] = sites
    return sites


def site_power_sums(sites, family: str, t_max: int, p: int):
    """sums[i][t - 1] = sum over the isogenies at site i of root^t."""
    out = []
    for s in sites:
        roots = [iso.root(family) for iso in s.isogenies]
        out.append([sum(pow(r, t, p) for r in roots) % p for t in range(1, t_max + 1)])
    return out


def power_sum_coefficients_mod(sites, ell: int, family: str, p: int):
    """Basis coefficients of sigma_1..sigma_{ell+1} solved from the site values."""
    w = X_WEIGHT[family]
    sums = site_power_sums(sites, family, ell + 1, p)
    values = [s.modular_values() for s in sites]
    out = []
    for t in range(1, ell + 2):
        rows = [point_rows(w * t, e4, e6, d, p) for e4, e6, d in values]
        if not rows[0]:
            out.append([])
            continue
        out.append(solve_mod_p(rows, [s[t - 1] for s in sums], p))
    return out


def compute_poly_mod(sites, ell: int, family: str, p: int) -> TriPoly:
    w = X_WEIGHT[family]
    ring = GF(p)
    forms = []
    for t, cs in enumerate(power_sum_coefficients_mod(sites, ell, family, p), start=1):
        eps, m, _ = weight_params(w * t)
        forms.append(TriPoly({(0, m - 3 * j, eps, j): c for j, c in enumerate(cs)}, ring))
    return _assemble(forms, ring, ell, w, family)


def numerator_ab_support(ell: int, which: str):
    """(r, iA, iB) with r + 2 iA + 3 iB = ell + 2 (A) or ell + 3 (B), r <= ell."""
    top = ell + 2 if which == "A" else ell + 3
    return [(r, a, (top - r - 2 * a) // 3)
            for r in range(ell + 1) for a in range((top - r) // 2 + 1)
            if (top - r - 2 * a) % 3 == 0]


def _monomial(x, a, b, key, p):
    r, i, k = key
    return pow(x, r, p) * pow(a, i, p) * pow(b, k, p) % p


def numerator_system(sites, ell: int, U: TriPoly, which: str, p: int, dual: bool = True, records=None):
    """(matrix, rhs, keys) for the AB-form numerator.

    Primal rows use (kappa_1, A, B) at the site with right side U'(kappa_1) A*;
    dual rows use (-ell kappa_1, A*, B*) with right side U'(...) ell^4 A
    (ell^6 B for the B numerator).  ``records`` limits the rows to chosen
    (site index, isogeny index) pairs.
    """
    keys = numerator_ab_support(ell, which)
    dU = to_ab_form(U.map_ring(GF(p))).diff_x()
    idx = 0 if which == "A" else 1
    scale = pow(ell, 4 if which == "A" else 6, p)
    if records is None:
        records = [(i, k) for i, s in enumerate(sites) for k in range(len(s.isogenies))]
    matrix, rhs = [], []
    for i, k in records:
        site = sites[i]
        iso = site.isogenies[k]
        here = (site.curve.A, site.curve.B)
        if dual:
            x = -ell * iso.kernel_trace % p
            a, b = iso.codomain
            target = scale * here[idx]
        else:
            x = iso.kernel_trace
            a, b = here
            target = iso.codomain[idx]
        d = int(dU.evaluate(x, a, b)) % p
        matrix.append([_monomial(x, a, b, key, p) for key in keys])
        rhs.append(d * target % p)
    return matrix, rhs, keys


def compute_numerators_mod(sites, ell: int, U: TriPoly, p: int, dual: bool = True):
    """(A_ell, B_ell) mod p in AB form."""
    out = []
    for which in ("A", "B"):
        matrix, rhs, keys = numerator_system(sites, ell, U, which, p, dual)
        sol = solve_mod_p(matrix, rhs, p)
        out.append(ABPoly(dict(zip(keys, sol)), GF(p), ell, which))
    return tuple(out)


def crt_assemble(ell: int, family: str, D: int, H: ClassPolynomial | None = None,
                 start: int = 1 << 40, max_primes: int = 200):
    """The integer Fricke polynomial from volcano primes above ``start``.

    Primes are added until the modulus covers the height bound and one more
    prime leaves the lift unchanged.  Returns (poly, primes used).
    """
    H = H or load_classpoly(D)
    w = X_WEIGHT[family]
    acc = CrtAccumulator(height_bound(ell, w))
    previous = None
    for n, params in enumerate(volcano_primes(ell, D, start)):
        if n >= max_primes:
            raise RuntimeError("CRT did not stabilise")
        try:
            sites = partial_volcano(params, H)
        except DegenerateSite:
            continue
        acc.add(params.p, compute_poly_mod(sites, ell, family, params.p).terms)
        if acc.enough:
            current = acc.values()
            if current == previous:
                return TriPoly(current, ZZ, ell, w, family), list(acc.primes)
            previous = current
