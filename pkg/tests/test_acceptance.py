"""One test per acceptance criterion; each prints a PASS/FAIL line with its evidence.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines.
"""

import math
import random

import mpmath
import pytest
import sympy as sp

import oracles
import reference_data as ref
from conftest import ab_sympy, as_sympy, parse
from fricke import cli
from fricke.atkin import e4_tilde, e6_tilde, exact_partials, isogenous_from_U, partials_at
from fricke.core import coefficients_to_power_sums, newton_to_coefficients, rank_mod_p, relative_height
from fricke.eisenval import e46_from_theta, eisenstein_values, theta_values
from fricke.fricke_float import accumulate_systems, compute_fricke_float, round_to_integers, working_precision
from fricke.fricke_series import (
    compute_fricke_polynomial,
    compute_numerators_series,
    compute_phi_general,
    power_sum_coefficients,
)
from fricke.qseries import eisenstein_series, fell_series
from fricke.rings import GF
from fricke.volcano import (
    compute_poly_mod,
    crt_assemble,
    find_volcano_prime,
    load_classpoly,
    numerator_system,
    partial_volcano,
    power_sum_coefficients_mod,
    roots_mod_p,
    site_power_sums,
)

VOLCANO_D = {5: -71, 7: -239, 11: -239, 13: -311}


def report(n, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    extra = "; ".join(failures) if failures else detail
    print(f"\ncriterion {n}: {status}" + (f" ({extra})" if extra else ""))
    assert not failures, extra


# ---------------------------------------------------------------- 1. exact fixtures


def test_criterion_1_exact_fixtures():
    failures = []
    U = {ell: compute_fricke_polynomial(ell, "U") for ell in (2, 3, 5)}
    A3, B3 = compute_numerators_series(3)
    A5, B5 = compute_numerators_series(5)
    X, A, B = sp.symbols("X A B")
    checks = {
        "U_2": ab_sympy(U[2]) == parse(ref.U2_AB),
        "U_3": ab_sympy(U[3]) == sp.expand((3 * X ** 4 + 6 * A * X ** 2 + 12 * B * X - A ** 2) / 3),
        "W_3": as_sympy(compute_fricke_polynomial(3, "W")) == parse(ref.W3),
        "A_3": as_sympy(A3) == parse(ref.A3),
        "B_3": as_sympy(B3) == parse(ref.B3),
        "U_5": as_sympy(U[5]) == parse(ref.U5),
        "U_5 (A, B)": ab_sympy(U[5]) == parse(ref.U5_AB),
        "A_5": as_sympy(A5) == parse(ref.A5),
        "B_5": as_sympy(B5) == parse(ref.B5),
        "Phi[E4(6 tau)]": as_sympy(compute_phi_general(6, "E4")) == parse(ref.PHI_E4_6),
    }
    failures = [name for name, ok in checks.items() if not ok]
    report(1, failures, f"{len(checks)} displays equal")


# ---------------------------------------------------------------- 2. cross-method agreement


@pytest.mark.slow
def test_criterion_2_cross_method_agreement():
    failures = []
    compared = 0
    for ell in (5, 7, 11, 13):
        D = VOLCANO_D[ell]
        H = load_classpoly(D)
        params = find_volcano_prime(ell, D)
        sites = partial_volcano(params, H)
        for family, w in (("U", 2), ("V", 4), ("W", 6)):
            series = compute_fricke_polynomial(ell, family)
            if compute_fricke_float(ell, w) != series:
                failures.append(f"float {family}_{ell}")
            if compute_poly_mod(sites, ell, family, params.p) != series.map_ring(GF(params.p)):
                failures.append(f"volcano mod {params.p} {family}_{ell}")
            lifted, primes = crt_assemble(ell, family, D, H)
            if lifted != series:
                failures.append(f"volcano CRT {family}_{ell}")
            compared += 1
    report(2, failures, f"{compared} polynomials agree across series, float, volcano mod p and CRT")


# ---------------------------------------------------------------- 3. worked examples


def test_criterion_3_worked_examples(U5):
    failures = []
    # (a) sigma_6 from the q-series and from the float system
    if tuple(power_sum_coefficients(5, "U")[5]) != ref.SIGMA6_COEFFS:
        failures.append("(a) series sigma_6")
    prec = working_precision(5, 2)
    S = accumulate_systems(5, 2, prec)[5]
    if tuple(round_to_integers(S.solution)) != ref.SIGMA6_COEFFS:
        failures.append("(a) float sigma_6")
    # (b) the two printed rows of the sigma_6 system, to relative 1e-6
    for i, key in enumerate(("1.1", "1.2")):
        got = (S.rows[i][0], S.rows[i][1], S.rhs[i])
        for g, v in zip(got, ref.L6_ROWS[key]):
            if abs(g / mpmath.mpf(v) - 1) >= 1e-6:
                failures.append(f"(b) row {key}")
    # (c) the D = -71 example at p = 1811
    params = find_volcano_prime(5, -71)
    sites = sorted(partial_volcano(params, load_classpoly(-71)), key=lambda s: (s.curve.A, s.curve.B))
    if set(roots_mod_p(load_classpoly(-71).coeffs, params.p)) != ref.CRATER_J:
        failures.append("(c) H_D roots")
    sums = site_power_sums(sites, "U", 6, params.p)
    if {(s.curve.A, s.curve.B): tuple(r) for s, r in zip(sites, sums)} != ref.SITE_POWER_SUMS:
        failures.append("(c) power sums")
    sigma = power_sum_coefficients_mod(sites, 5, "U", params.p)
    if [list(c) for c in sigma[1:]] != [list(c) for c in ref.SIGMA_MOD_1811]:
        failures.append("(c) sigma list")
    # (d) the isogenous curve mod 1009
    ex = ref.ATKIN
    p = ex["p"]
    E4, E6 = -ex["A"] * pow(3, -1, p) % p, -ex["B"] * pow(2, -1, p) % p
    ps = partials_at(U5, ex["kappa"], E4, E6, p)
    if (ps.k, ps.e4, ps.e6) != ex["partials"]:
        failures.append("(d) partials")
    if e4_tilde(5, ex["kappa"], E4, E6, ps) != ex["E4t"]:
        failures.append("(d) E4~")
    row = [r for r in isogenous_from_U(5, (ex["A"], ex["B"], p), U5) if r.kappa == ex["kappa"]]
    if not row or (row[0].A_star, row[0].B_star) != (ex["A*"], ex["B*"]):
        failures.append("(d) A*, B*")
    report(3, failures, "(a) (b) (c) (d) reproduced")


# ---------------------------------------------------------------- 4. heights

U_ELLS = (3, 5, 7, 11, 13, 17, 19, 23)


@pytest.fixture(scope="module")
def height_tables():
    u = cli.heights_table(U_ELLS, ("U",))
    vwab = cli.heights_table((5, 7, 11, 13), ("V", "W", "A", "B"))
    return u, vwab


def height_failures(height_tables, skip_u3=False):
    u, vwab = height_tables
    failures = []
    for ell in U_ELLS:
        if skip_u3 and ell == 3:
            continue
        got, want = u[ell][0], float(ref.HEIGHTS_U[ell])
        if abs(got - want) > 0.002:
            failures.append(f"U_{ell}: {got:.5f} vs {want}")
    for ell, row in ref.HEIGHTS_VWAB.items():
        for fam, got, want in zip("VWAB", vwab[ell], row):
            if abs(got - want) > 0.002:
                failures.append(f"{fam}_{ell}: {got:.5f} vs {want}")
    return failures


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="U_3 is 0.3155; the table prints 0.32, outside +-0.002")
def test_criterion_4_heights(height_tables):
    report(4, height_failures(height_tables), "all heights within 0.002")


@pytest.mark.slow
def test_criterion_4_heights_other_than_u3(height_tables):
    failures = height_failures(height_tables, skip_u3=True)
    print(f"\ncriterion 4 without U_3: {'PASS' if not failures else 'FAIL'}")
    assert not failures
    # U_3 still rounds to the two printed decimals
    assert f"{height_tables[0][3][0]:.2f}" == ref.HEIGHTS_U[3]


# ---------------------------------------------------------------- 5. property suites


def test_criterion_5_property_suites(sites1811):
    failures = []
    T = 50
    e2, e4, e6 = (eisenstein_series(k, T) for k in (1, 2, 3))
    if not ((e4.q_derivative() * 3).agrees(e2 * e4 - e6) and (e6.q_derivative() * 2).agrees(e2 * e6 - e4 * e4)
            and (e2.q_derivative() * 12).agrees(e2 * e2 - e4)):
        failures.append("Ramanujan system")
    if (fell_series(7, T) / 7).list() != [6 * c for c in oracles.ternary_theta_square(T)]:
        failures.append("F_7 theta identity")

    k, e4s, e6s = sp.symbols("k e4 e6")
    for ell in (3, 5, 7, 11, 13):
        P = exact_partials(compute_fricke_polynomial(ell, "U"))
        e = {n: sp.Add(*[sp.Rational(v) * k ** a * e4s ** b * e6s ** c for (a, b, c), v in P[n].items()]) for n in P}
        identities = [
            (ell + 1) * e["U"] - (k * e["k"] + 2 * e4s * e["4"] + 3 * e6s * e["6"]),
            ell * e["k"] - (k * e["kk"] + 2 * e4s * e["k4"] + 3 * e6s * e["k6"]),
            (ell - 1) * e["4"] - (k * e["k4"] + 2 * e4s * e["44"] + 3 * e6s * e["46"]),
            (ell - 2) * e["6"] - (k * e["k6"] + 2 * e4s * e["46"] + 3 * e6s * e["66"]),
        ]
        if any(sp.expand(x) != 0 for x in identities):
            failures.append(f"homogeneity identities ell={ell}")

    rng = random.Random(5)
    for _ in range(20):
        coeffs = [rng.randrange(-50, 50) for _ in range(6)]
        if newton_to_coefficients(coefficients_to_power_sums(coeffs)) != coeffs:
            failures.append("Newton round trip")
            break

    U5 = compute_fricke_polynomial(5, "U")
    from fricke.atkin import U_at_curve

    x = sp.Symbol("x")
    for s in sites1811:
        e4v, e6v, _ = s.modular_values()
        prod = sp.Poly(sp.prod([x - iso.kernel_trace for iso in s.isogenies]), x, modulus=1811)
        if prod != sp.Poly(U_at_curve(U5, e4v, e6v, 1811), x, modulus=1811):
            failures.append("root product")
        for iso in s.isogenies:
            k0, k1, k2, k3 = iso.kappa
            A2, B2 = iso.codomain
            E = s.curve
            if ((E.A - A2 - 5 * (6 * k2 + 2 * E.A * k0)) % 1811
                    or (E.B - B2 - 7 * (10 * k3 + 6 * E.A * k1 + 4 * E.B * k0)) % 1811):
                failures.append("Elkies identities")

    prec = 256
    with mpmath.workprec(prec):
        for rho in ("1.1", "1.7", "2.9"):
            rho = mpmath.mpf(rho)
            _, E4, E6, Dl = eisenstein_values(mpmath.exp(-2 * mpmath.pi * rho), prec)
            t4, t6, td = e46_from_theta(*theta_values(mpmath.exp(-mpmath.pi * rho), prec))
            tol = mpmath.mpf(2) ** (12 - prec)
            if any(abs(a / b - 1) > tol for a, b in ((t4, E4), (t6, E6), (td, Dl))):
                failures.append(f"theta vs T at rho={rho}")

    params = find_volcano_prime(11, -239)
    sites = partial_volcano(params, load_classpoly(-239))
    p = params.p
    U11 = compute_fricke_polynomial(11, "U", GF(p))
    records = [(0, j) for j in range(12)] + [(1, j) for j in range(8)]
    primal, _, _ = numerator_system(sites, 11, U11, "A", p, False, records)
    dual, _, _ = numerator_system(sites, 11, U11, "A", p, True, records)
    ranks = rank_mod_p(primal, p), rank_mod_p(dual, p)
    if ranks != (19, 20):
        failures.append(f"ell=11 ranks {ranks}")
    report(5, failures, f"all suites hold; ell=11 primal/dual ranks {ranks}")


# ---------------------------------------------------------------- 6. scale


@pytest.mark.slow
def test_criterion_6_ell_101():
    U101 = compute_fricke_polynomial(101, "U")
    h = relative_height(U101, 101)
    failures = [] if abs(h - float(ref.HEIGHTS_U[101])) <= 0.005 else [f"H~(U_101) = {h:.5f}"]
    report(6, failures, f"H~(U_101) = {h:.4f}")
