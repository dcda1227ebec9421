import mpmath
import pytest

import reference_data as ref
from fricke.formbasis import (
    NotInSpan,
    build_basis,
    build_shared_grid,
    dimension,
    express_form,
    grid_index_set,
    lemma_solutions,
    point_rows,
    weight_params,
)
from fricke.qseries import delta_series, eisenstein_series
from fricke.rings import GF, QQ

T = 30
E4 = eisenstein_series(2, T)
E6 = eisenstein_series(3, T)
DL = delta_series(T)


def enumerate_exponents(k):
    """All (i6, i4, i12) with 2 i4 + 3 i6 + 6 i12 = k, i6 in {0, 1}, by brute force."""
    return sorted((i6, i4, i12) for i6 in (0, 1) for i4 in range(k + 1) for i12 in range(k + 1)
                  if 2 * i4 + 3 * i6 + 6 * i12 == k)


def test_lemma_examples():
    assert set(lemma_solutions(6)) == {(0, 3, 0), (0, 0, 1)}
    assert lemma_solutions(2) == [(0, 1, 0)]
    assert lemma_solutions(7) == [(1, 2, 0)]


@pytest.mark.parametrize("k", range(2, 40))
def test_lemma_matches_enumeration(k):
    assert sorted(lemma_solutions(k)) == enumerate_exponents(k)
    assert dimension(2 * k) == len(enumerate_exponents(k))


def test_weight_params_rejects_odd():
    with pytest.raises(ValueError):
        weight_params(3)
    with pytest.raises(ValueError):
        lemma_solutions(1)


def test_basis_weight_12():
    b = build_basis(12, E4, E6, DL)
    assert b.entries[0].agrees(E4 ** 3)
    assert b.entries[1].agrees(DL)
    assert [DL[n] for n in range(2)] == [0, 1]


def test_basis_weight_4_is_e4():
    assert build_basis(4, E4, E6, DL).entries == [E4]


@pytest.mark.parametrize("w", range(4, 80, 2))
def test_basis_entries_and_cost(w):
    eps, m, jmax = weight_params(w)
    b = build_basis(w, E4, E6, DL)
    for j, P in enumerate(b.entries):
        assert P.agrees(E6 ** eps * E4 ** (m - 3 * j) * DL ** j)
        # P_{w,j} = q^j + O(q^(j+1))
        assert [P[n] for n in range(j + 1)] == [0] * j + [1]
    assert b.multiplications <= 3 * jmax + 2


def test_grid_index_set_ell5_weight2():
    # r = 1..6, weight 2r, k = 1
    expected = set()
    for r in range(1, 7):
        if r > 1:
            expected |= set(enumerate_exponents(r))
    assert grid_index_set(6, 1) == expected
    assert max(i4 for eps, i4, _ in expected if eps == 0) == 6 // 2


@pytest.mark.parametrize("k", [2, 4, 6])
def test_even_k_leaves_odd_grid_empty(k):
    assert all(eps == 0 for eps, _, _ in grid_index_set(8, k))


@pytest.mark.parametrize("psi, k", [(6, 1), (8, 2), (12, 3), (14, 1)])
def test_shared_grid_values(psi, k):
    grid = build_shared_grid(psi, k, E4, E6, DL)
    needed = grid_index_set(psi, k)
    assert set(grid.values) == needed
    for eps, x, y in needed:
        assert grid.values[(eps, x, y)].agrees(E6 ** eps * E4 ** x * DL ** y)
    # at most one product per point plus the E4 powers and the Delta column
    assert grid.multiplications <= 2 * len(needed) + 2 * psi


def test_express_sigma6():
    sigma6 = ref.SIGMA6_COEFFS[0] * E4 ** 3 + ref.SIGMA6_COEFFS[1] * DL
    assert (sigma6[0], sigma6[1]) == ref.SIGMA6_SERIES_HEAD
    assert express_form(sigma6, 12) == list(ref.SIGMA6_COEFFS)


def test_express_basis_vectors():
    assert express_form(E4 ** 3, 12) == [1, 0]
    assert express_form(DL, 12) == [0, 1]


def test_express_rejects_non_forms():
    with pytest.raises(NotInSpan):
        express_form(E4 + DL, 4)
    with pytest.raises(NotInSpan):
        express_form(E4.truncate(1), 12)


def test_express_mod_p():
    F = GF(1811)
    f = (E4 ** 3 * 648 + DL * 523).change_ring(F)
    assert express_form(f, 12) == [648, 523]


def test_point_row_float_node():
    mpmath.mp.prec = 200
    q = mpmath.exp(-2 * mpmath.pi * mpmath.mpf("1.1"))
    from fricke.eisenval import eisenstein_values

    _, e4, e6, d = eisenstein_values(q, 200)
    row = point_rows(12, e4, e6, d)
    e43, dl = (mpmath.mpf(v) for v in ref.L6_ROWS["1.1"][:2])
    assert abs(row[0] / e43 - 1) < 1e-9
    assert abs(row[1] / dl - 1) < 1e-12


def test_point_row_mod_1811(sites1811):
    site = next(s for s in sites1811 if (s.curve.A, s.curve.B) == (1582, 902))
    e4, e6, d = site.modular_values()
    assert (e4, d) == (680, 1067)
    assert point_rows(12, e4, e6, d, 1811) == [pow(680, 3, 1811), 1067]


def test_point_row_weight4():
    assert point_rows(4, 7, 3, 2) == [7]
