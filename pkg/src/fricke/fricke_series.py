"""Fricke polynomials and their numerators from exact q-expansions.

For a prime ell the ell + 1 roots of each polynomial are one "main" series in
q and ell conjugates g(z zeta^h) with z^ell = q.  The conjugate power sums are
read off by decimating g^t, so no cyclotomic arithmetic is ever needed:

* U: kernel trace kappa_1 = -(ell/2) F_ell(q) and F_ell(z zeta^h)/2;
* V: A* = -3 ell^4 E4(q^ell) and -3 E4(z zeta^h);
* W: B* = -2 ell^6 E6(q^ell) and -2 E6(z zeta^h).

For ell = 2 the kernel trace is the abscissa of the 2-torsion point itself, so
the halving is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    X_WEIGHT,
    CrtAccumulator,
    SingularSystem,
    TriPoly,
    coset_representatives,
    newton_to_coefficients,
    prime_factors,
    psi,
    reduce_matrix,
    solve_mod_p,
    to_ab_form,
    word_primes,
)
from .formbasis import build_shared_grid, express_form, weight_params
from .qseries import QSeries, delta_series, eisenstein_series, fell_series
from .rings import QQ, ZZ, GF, PrimeField, Ring

LOG_1728 = math.log(1728)


def working_order(ell: int, weight_w: int, guard: int = 4) -> int:
    """Number of q-coefficients needed to pin down forms of weight weight_w * (ell + 1)."""
    return -(-weight_w * (ell + 1) // 12) + guard


def kernel_trace_series(ell: int, T: int, ring: Ring = ZZ) -> QSeries:
    """kappa_1(q): the root of U_ell attached to the isogeny q -> q^ell."""
    f = fell_series(ell, T, ring)
    return f if ell == 2 else f / 2


def multiplier_series(ell: int, T: int, ring: Ring = ZZ) -> QSeries:
    """F_ell(q) = E2(q) - ell E2(q^ell)."""
    return fell_series(ell, T, ring) / (-ell)


def _roots(ell: int, family: str, T: int, ring: Ring):
    """(main root to order T, conjugate generator to order ell * T)."""
    big = ell * T
    if family == "U":
        conj = multiplier_series(ell, big, ring)
        if ell != 2:
            conj = conj / 2
        return kernel_trace_series(ell, T, ring), conj
    if family == "V":
        e4 = eisenstein_series(2, big, ring)
        return e4.truncate(T).subs_power(ell).truncate(T) * (-3 * ell ** 4), e4 * (-3)
    if family == "W":
        e6 = eisenstein_series(3, big, ring)
        return e6.truncate(T).subs_power(ell).truncate(T) * (-2 * ell ** 6), e6 * (-2)
    raise ValueError(f"unknown family {family!r}")


@dataclass
class PowerSumSet:
    ell: int
    weight_w: int
    order: int
    sums: list  # sums[t - 1] = sigma_t

    def __getitem__(self, t: int) -> QSeries:
        return self.sums[t - 1]


def power_sums(ell: int, family: str, T: int | None = None, ring: Ring = ZZ) -> PowerSumSet:
    """sigma_1..sigma_{ell+1} of the roots of the given family, as q-series."""
    if family not in ("U", "V", "W"):
        raise ValueError(f"unknown family {family!r}")
    w = X_WEIGHT[family]
    T = T or working_order(ell, w)
    main, conj = _roots(ell, family, T, ring)
    sums = []
    mp, cp = main, conj
    for t in range(1, ell + 2):
        if t > 1:
            mp = mp * main
            cp = cp * conj
        sums.append(mp + cp.decimate(ell, 1).truncate(T))
    return PowerSumSet(ell, w, T, sums)


def power_sums_U(ell: int, T: int | None = None, ring: Ring = ZZ) -> PowerSumSet:
    return power_sums(ell, "U", T, ring)


def _mobius(n: int) -> int:
    fs = prime_factors(n)
    if math.prod(fs) != n:
        return 0
    return -1 if len(fs) % 2 else 1


def divisor_components(N: int):
    """(D, A, count) for each D | N, count = number of cosets reducing to denominator D."""
    out = {}
    for M in coset_representatives(N):
        a, b, c, d = M
        A, B, D = reduce_matrix((N * a, N * b, c, d), N)
        out[D] = (A, out.get(D, (A, 0))[1] + 1)
    return [(D, A, n) for D, (A, n) in sorted(out.items())]


def power_sums_fN(f: QSeries, N: int, w: int, T: int, t_max: int | None = None) -> PowerSumSet:
    """Power sums of the N^w-scaled conjugates f((A tau + B)/D) A^w of f(N tau).

    f must be known to order N * T.
    """
    t_max = t_max or psi(N)
    if f.prec < N * T:
        raise ValueError(f"f is needed to order {N * T}")
    divisors = [D for D in range(1, N + 1) if N % D == 0]
    sums = []
    ft = None
    for t in range(1, t_max + 1):
        ft = f if ft is None else ft * f
        total = None
        for D in divisors:
            A = N // D
            g = math.gcd(A, D)
            part = None
            for e in (d for d in range(1, g + 1) if g % d == 0):
                mu = _mobius(e)
                if not mu:
                    continue
                piece = ft.decimate(D // e, A // e).truncate(T).scale(mu)
                part = piece if part is None else part + piece
            part = part.scale(A ** (w * t))
            total = part if total is None else total + part
        sums.append(total)
    return PowerSumSet(N, w, T, sums)


def decimation_component(f: QSeries, N: int, D: int, w: int, t: int, T: int) -> QSeries:
    """A^(wt) * S_{D,t}: the part of S_t coming from denominator D."""
    A = N // D
    return (f ** t).decimate(D, A).truncate(T).scale(A ** (w * t))


def _forms_from_sums(ps: PowerSumSet, ring: Ring):
    """Express every sigma_t in the P_{w t, j} basis; returns TriPoly forms."""
    T = ps.order
    k = ps.weight_w // 2
    grid = build_shared_grid(len(ps.sums), k, eisenstein_series(2, T, ring),
                             eisenstein_series(3, T, ring), delta_series(T, ring))
    forms = []
    coeff_lists = []
    for t, s in enumerate(ps.sums, start=1):
        w = ps.weight_w * t
        eps, m, jmax = weight_params(w)
        basis = grid.basis(w) if jmax >= 0 else []
        cs = express_form(s, w, basis)
        coeff_lists.append(cs)
        forms.append(TriPoly({(0, m - 3 * j, eps, j): c for j, c in enumerate(cs)}, ring))
    return forms, coeff_lists


def _assemble(forms, ring: Ring, ell, weight_w, family) -> TriPoly:
    work = QQ if ring is ZZ else ring
    forms = [f.map_ring(work) for f in forms]
    coeffs = newton_to_coefficients(forms)
    n = len(forms)
    terms = {(n, 0, 0, 0): 1}
    for k, c in enumerate(coeffs, start=1):
        for (_, a, b, d), v in c.terms.items():
            terms[(n - k, a, b, d)] = v
    poly = TriPoly(terms, work, ell, weight_w, family)
    return poly.integral() if ring is ZZ else poly


def power_sum_coefficients(ell: int, family: str, ring: Ring = ZZ):
    """The basis coefficients of sigma_1..sigma_{ell+1}."""
    return _forms_from_sums(power_sums(ell, family, ring=ring), ring)[1]


def height_bound(ell: int, weight_w: int) -> float:
    """Crude bound (nats) for coefficients in the (E4, E6, Delta) form."""
    jmax = weight_w * (ell + 1) // 12
    return weight_w * (ell + 1) * math.log(ell) + jmax * LOG_1728 + 2 * math.log(ell) + 10


def crt_lift(compute_mod_p, bound_nats: float, floor: int, start: int = 1 << 62):
    """Run ``compute_mod_p(p) -> dict`` over word primes until the CRT lift is stable.

    Primes are added until the modulus exceeds 2 e^bound, then one more prime
    must leave the reconstruction unchanged.
    """
    acc = CrtAccumulator(bound_nats)
    previous = None
    n = start
    while True:
        (p,) = word_primes(1, floor=floor, start=n)
        n = p
        acc.add(p, compute_mod_p(p))
        if acc.enough:
            current = acc.values()
            if current == previous:
                return current, acc.primes
            previous = current


def compute_fricke_polynomial(ell: int, family: str = "U", ring: Ring | None = None,
                              crt: bool | None = None, guard: int = 4) -> TriPoly:
    """U_ell, V_ell or W_ell in canonical (X, E4, E6, Delta) form.

    ``ring`` a prime field gives the polynomial mod p.  Otherwise the exact
    integer polynomial is computed, directly over ZZ or (``crt=True``, the
    default for ell > 40) modulo word primes with CRT.
    """
    w = X_WEIGHT[family]
    T = working_order(ell, w, guard)
    if isinstance(ring, PrimeField):
        forms, _ = _forms_from_sums(power_sums(ell, family, T, ring), ring)
        return _assemble(forms, ring, ell, w, family)
    if crt is None:
        crt = ell > 40
    if not crt:
        forms, _ = _forms_from_sums(power_sums(ell, family, T, ZZ), ZZ)
        return _assemble(forms, ZZ, ell, w, family)
    if ell <= 3:
        raise ValueError("the CRT route needs ell > 3")

    def one_prime(p):
        return compute_fricke_polynomial(ell, family, GF(p), guard=guard).terms

    terms, primes = crt_lift(one_prime, height_bound(ell, w), floor=max(ell + 1, 1728))
    return TriPoly(terms, ZZ, ell, w, family)


def compute_phi_general(N: int, f_tag: str = "E4", guard: int = 4, ring: Ring = ZZ) -> TriPoly:
    """Phi[f(N tau)]: the degree-psi(N) polynomial whose roots are the N^w-scaled conjugates."""
    w = {"E4": 4, "E6": 6, "D": 12, "Delta": 12}[f_tag]
    n = psi(N)
    T = -(-w * n // 12) + guard
    big = N * T
    if w == 4:
        f = eisenstein_series(2, big, ring)
    elif w == 6:
        f = eisenstein_series(3, big, ring)
    else:
        f = delta_series(big, ring)
    ps = power_sums_fN(f, N, w, T)
    forms, _ = _forms_from_sums(ps, ring)
    return _assemble(forms, ring, N, w, "PHI").with_meta(N, w, "PHI")


# --------------------------------------------------------------------------
# numerators A_ell, B_ell


def numerator_support(ell: int, which: str):
    """(r, i4, i6, i12) keys of the numerator, grouped by X-degree."""
    top = ell + 2 if which == "A" else ell + 3
    keys = []
    for r in range(ell + 1):
        w = 2 * (top - r)
        eps, m, jmax = weight_params(w)
        keys.extend((r, m - 3 * j, eps, j) for j in range(jmax + 1))
    return keys


def _evaluate_form_series(form: TriPoly, e4pows, e6, dpows, T, ring):
    total = QSeries([0] * T, ring)
    for (_, a, b, c), v in form.terms.items():
        term = e4pows[a] * dpows[c]
        if b:
            term = term * e6
        total = total + term.scale(v)
    return total


def _series_pows(s: QSeries, n: int):
    out = [QSeries([1] + [0] * (s.prec - 1), s.ring)]
    for _ in range(n):
        out.append(out[-1] * s)
    return out


def numerator_rows(ell: int, U: TriPoly, which: str, p: int, rows: int | None = None):
    """The linear system (matrix, rhs, keys) mod p equating q-coefficients of
    -3 ell^4 E4(q^ell) U'(kappa_1) (resp. -2 ell^6 E6(q^ell) U'(kappa_1)) and the
    numerator evaluated at kappa_1."""
    ring = GF(p)
    keys = numerator_support(ell, which)
    top = ell + 3
    sturm = -(-2 * top * (ell + 1) // 12) + 1
    R = rows or max(sturm + 8, len(keys) + 8)
    e4 = eisenstein_series(2, R, ring)
    e6 = eisenstein_series(3, R, ring)
    dl = delta_series(R, ring)
    kappa = kernel_trace_series(ell, R, ring)
    maxa = max(max(k[1] for k in keys), max((k[1] for k in U.terms), default=0))
    maxc = max(max(k[3] for k in keys), max((k[3] for k in U.terms), default=0))
    e4p = _series_pows(e4, maxa)
    dp = _series_pows(dl, maxc)
    kp = _series_pows(kappa, ell + 1)
    Up = U.map_ring(ring).diff_x()
    deriv = QSeries([0] * R, ring)
    for r in range(Up.degree + 1):
        deriv = deriv + kp[r] * _evaluate_form_series(Up.coefficient(r), e4p, e6, dp, R, ring)
    if which == "A":
        factor = e4.truncate(-(-R // ell)).subs_power(ell).truncate(R).scale(-3 * ell ** 4)
    else:
        factor = e6.truncate(-(-R // ell)).subs_power(ell).truncate(R).scale(-2 * ell ** 6)
    lhs = factor * deriv
    cols = []
    for r, a, b, c in keys:
        col = kp[r] * e4p[a] * dp[c]
        if b:
            col = col * e6
        cols.append(col)
    matrix = [[col[n] for col in cols] for n in range(R)]
    rhs = [lhs[n] for n in range(R)]
    return matrix, rhs, keys


def compute_numerator_mod_p(ell: int, U: TriPoly, which: str, p: int) -> TriPoly:
    matrix, rhs, keys = numerator_rows(ell, U, which, p)
    sol = solve_mod_p(matrix, rhs, p)
    return TriPoly(dict(zip(keys, sol)), GF(p), ell, 2, which)


def compute_numerators_series(ell: int, U: TriPoly | None = None):
    """(A_ell, B_ell) as exact TriPolys, solved mod word primes and lifted by CRT."""
    if U is None:
        U = compute_fricke_polynomial(ell, "U")
    out = []
    for which in ("A", "B"):
        support = numerator_support(ell, which)
        bound = 2 * (ell + 1) * math.log(ell) + max(k[3] for k in support) * LOG_1728 + 20

        def one_prime(p, which=which):
            return compute_numerator_mod_p(ell, U, which, p).terms

        terms, _ = crt_lift(one_prime, bound, floor=max(ell + 1, 1728))
        out.append(TriPoly(terms, ZZ, ell, 2, which))
    return tuple(out)


def numerators_ab(ell: int, U: TriPoly | None = None):
    A, B = compute_numerators_series(ell, U)
    return to_ab_form(A), to_ab_form(B)


__all__ = [
    "PowerSumSet",
    "SingularSystem",
    "compute_fricke_polynomial",
    "compute_numerators_series",
    "compute_phi_general",
    "decimation_component",
    "divisor_components",
    "kernel_trace_series",
    "multiplier_series",
    "numerator_rows",
    "numerator_support",
    "power_sum_coefficients",
    "power_sums",
    "power_sums_U",
    "power_sums_fN",
    "working_order",
]
