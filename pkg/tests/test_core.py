import json
import math
from fractions import Fraction
from itertools import product

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import A, B, D, E4, E6, X, ab_sympy, as_sympy, parse
from fricke.core import (
    ABPoly,
    CrtAccumulator,
    InconsistentSystem,
    SingularSystem,
    TriPoly,
    coefficients_to_power_sums,
    coset_representatives,
    crt_combine,
    from_ab_form,
    height,
    newton_to_coefficients,
    poly_from_json,
    psi,
    rank_mod_p,
    reduce_matrix,
    relative_height,
    same_coset,
    solve_mod_p,
    to_ab_form,
    word_primes,
)
from fricke.rings import GF, QQ
import reference_data as ref

e4 = TriPoly.gen("E4", QQ)
e6 = TriPoly.gen("E6", QQ)
dl = TriPoly.gen("D", QQ)


# ---------------------------------------------------------------- cosets


@pytest.mark.parametrize("N, expected", [(5, 6), (6, 12), (1, 1), (2, 3), (12, 24)])
def test_psi(N, expected):
    assert psi(N) == expected


def p1_size(N):
    """|P^1(Z/NZ)| by brute force over pairs modulo units."""
    units = [u for u in range(1, N) if math.gcd(u, N) == 1]
    classes = set()
    for c, d in product(range(N), repeat=2):
        if math.gcd(math.gcd(c, d), N) == 1:
            classes.add(min((u * c % N, u * d % N) for u in units))
    return len(classes)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6, 7, 9, 10, 12])
def test_coset_count_matches_enumeration(N):
    reps = coset_representatives(N)
    assert len(reps) == p1_size(N) == psi(N)
    assert all(m.det == 1 for m in reps)
    for i, m in enumerate(reps):
        assert not any(same_coset(m, n, N) for n in reps[i + 1:])


def test_cosets_of_level_five():
    got = [tuple(m) for m in coset_representatives(5)]
    assert got == [(1, 0, 0, 1), (1, 0, 1, 1), (1, 0, 2, 1), (1, 0, 3, 1), (1, 0, 4, 1), (0, -1, 1, 5)]


def test_cosets_of_level_six_biject_with_published_table():
    from fricke.core import CosetMatrix

    ours = coset_representatives(6)
    published = [CosetMatrix(*R) for R, _ in ref.COSETS_6]
    for R in published:
        assert sum(same_coset(R, m, 6) for m in ours) == 1


@pytest.mark.parametrize("R, reduced", ref.COSETS_6)
def test_reduce_matrix_published_rows(R, reduced):
    a, b, c, d = R
    assert reduce_matrix((6 * a, 6 * b, c, d), 6) == reduced


def test_reduce_matrix_trivial_and_errors():
    assert reduce_matrix((7, 0, 0, 1), 7) == (7, 0, 1)
    with pytest.raises(ValueError):
        reduce_matrix((1, 0, 0, 1), 6)


# ---------------------------------------------------------------- polynomials


def test_canonical_form_removes_e6_squares():
    P = e6 * e6
    assert P == e4 ** 3 - dl * 1728
    assert all(k[2] < 2 for k in (P * e6 * e6 * e6).terms)


def test_tripoly_arithmetic_and_structure():
    x = TriPoly.gen("X")
    P = x ** 2 - TriPoly.gen("E4") * 3
    assert P.degree == 2 and P.is_monic()
    assert P.diff_x() == x * 2
    assert P.coefficient(0) == TriPoly.gen("E4") * -3
    assert P.weights() == {4}
    assert P.evaluate(2, 1, 0, 0) == 1


def test_to_ab_form_of_u5(U5):
    assert ab_sympy(U5) == parse(ref.U5_AB)
    assert as_sympy(from_ab_form(to_ab_form(U5))) == parse(ref.U5)


def test_to_ab_form_generators():
    assert to_ab_form(e4).terms == {(0, 1, 0): Fraction(-1, 3)}
    oracle = sp.expand((E4 ** 3 - E6 ** 2) / 1728).subs({E4: -A / 3, E6: -B / 2})
    assert sp.expand(sp.sympify(to_ab_form(dl).to_text().replace("^", "**"))) == sp.expand(oracle)
    assert sp.expand(oracle + (4 * A ** 3 + 27 * B ** 2) / 186624) == 0


def test_to_ab_form_mod_p(U5):
    p = 1811
    direct = to_ab_form(U5.map_ring(GF(p)))
    reduced = to_ab_form(U5).map_ring(GF(p))
    assert direct == reduced


def test_json_round_trip(U5):
    back = poly_from_json(json.loads(json.dumps(U5.to_json())))
    assert back == U5 and back.family == "U" and back.ell == 5
    ab = to_ab_form(U5)
    assert poly_from_json(ab.to_json()) == ab


def test_text_display_order(U5):
    assert U5.to_text().startswith("X^6 - 60*X^4*E4 - 320*X^3*E6")


# ---------------------------------------------------------------- Newton identities


def u5_power_sums():
    return [TriPoly({}, QQ), e4 * 120, e6 * 960, e4 * e4 * 10080, e4 * e6 * 99840,
            e4 ** 3 * 1000320 - dl * 534159360]


def test_newton_gives_u5_coefficients():
    coeffs = newton_to_coefficients(u5_power_sums())
    expected = [0, -60 * E4, -320 * E6, -720 * E4 ** 2, -768 * E4 * E6, -320 * E4 ** 3 + 552960 * D]
    assert [as_sympy(c) for c in coeffs] == [sp.expand(e) for e in expected]


def test_power_sums_four_and_five_from_u5_coefficients():
    # p4, p5 recomputed from the U5 coefficients by the Newton recursion in sympy
    c = [sp.Integer(0), -60 * E4, -320 * E6, -720 * E4 ** 2, -768 * E4 * E6, -320 * E4 ** 3 + 552960 * D]
    p = []
    for k in range(1, 7):
        acc = -k * c[k - 1] - sum(c[i - 1] * p[k - i - 1] for i in range(1, k))
        p.append(sp.expand(acc.subs(E6 ** 2, E4 ** 3 - 1728 * D)))
    assert p[3] == 10080 * E4 ** 2 and p[4] == 99840 * E4 * E6


def test_newton_mod_1811_matches_published_sigma_list(U5):
    p = 1811
    F = GF(p)
    sums = [TriPoly({}, F), TriPoly.gen("E4", F) * 120, TriPoly.gen("E6", F) * 960,
            TriPoly.gen("E4", F) ** 2 * 1025, TriPoly.gen("E4", F) * TriPoly.gen("E6", F) * 235,
            TriPoly.gen("E4", F) ** 3 * 648 + TriPoly.gen("D", F) * 523]
    coeffs = newton_to_coefficients(sums, divide=lambda a, k: a / k)
    U = U5.map_ring(F)
    assert [c.terms for c in coeffs] == [U.coefficient(5 - k).terms for k in range(6)]


def test_newton_single():
    assert newton_to_coefficients([Fraction(7)]) == [-7]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8))
def test_newton_round_trip_on_integer_roots(roots):
    sums = [sum(r ** k for r in roots) for k in range(1, len(roots) + 1)]
    coeffs = newton_to_coefficients(sums)
    x = sp.Symbol("x")
    expected = sp.Poly(sp.prod([x - r for r in roots]), x).all_coeffs()[1:]
    assert coeffs == expected
    assert coefficients_to_power_sums(coeffs) == sums


# ---------------------------------------------------------------- heights


def test_relative_height_u5(U5):
    assert relative_height(U5, 5) == pytest.approx(math.log(160) / (6 * math.log(5)))
    assert abs(relative_height(U5, 5) - 0.526) <= 0.001


def test_relative_height_u3_to_printed_precision():
    from fricke.fricke_series import compute_fricke_polynomial

    assert abs(relative_height(compute_fricke_polynomial(3, "U"), 3) - 0.32) <= 0.01


def test_monic_power_has_height_zero():
    assert relative_height(ABPoly({(6, 0, 0): 1}), 5) == 0
    with pytest.raises(ValueError):
        height(ABPoly({}))


# ---------------------------------------------------------------- CRT


def test_crt_symmetric_range():
    assert crt_combine([(2, 3), (3, 5)]) == -7
    assert crt_combine([(648, 1811)]) == 648


def test_crt_recovers_sigma6_delta_coefficient():
    value = -534159360
    p2 = word_primes(1, start=1 << 31)[0]
    assert crt_combine([(523, 1811), (value % p2, p2)]) == value
    assert value % 1811 == 523


def test_crt_rejects_repeated_modulus():
    with pytest.raises(ValueError):
        crt_combine([(1, 7), (2, 7)])


@settings(max_examples=50, deadline=None)
@given(st.integers(-10 ** 30, 10 ** 30))
def test_crt_accumulator_lifts_any_bounded_integer(n):
    primes = word_primes(3, start=1 << 40)
    acc = CrtAccumulator(math.log(10 ** 30))
    for p in primes:
        acc.add(p, {(0,): n % p})
    assert acc.enough
    assert acc.values() == ({(0,): n} if n else {})


def test_word_primes_descend():
    ps = word_primes(4, start=1 << 62)
    assert ps == sorted(ps, reverse=True) and all(sp.isprime(p) for p in ps)


# ---------------------------------------------------------------- linear algebra


def test_solve_mod_p_and_failures():
    p = 1811
    assert solve_mod_p([[1, 2], [3, 4], [5, 6]], [5, 11, 17], p) == [1, 2]
    with pytest.raises(SingularSystem):
        solve_mod_p([[1, 2], [2, 4]], [1, 2], p)
    with pytest.raises(InconsistentSystem):
        solve_mod_p([[1, 0], [0, 1], [1, 1]], [1, 1, 5], p)
    assert rank_mod_p([[1, 2], [2, 4]], p) == 1
