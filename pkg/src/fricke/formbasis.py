"""Level-one modular forms written in the basis P_{w,j} = E6^eps E4^(m-3j) Delta^j.

A form of weight w = 2k is a combination of the P_{w,j}, 0 <= j <= floor(m/3),
where k = 2 k0 + eps and m = k0 - eps.  Because P_{w,j} = q^j + O(q^(j+1)) the
coefficients come out of a triangular solve.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field

from .qseries import QSeries, delta_series, eisenstein_series


class NotInSpan(ValueError):
    """The series is not a form of the requested weight at the available order."""


def weight_params(w: int):
    """(eps, m, j_max) for weight w; j_max = -1 when the space is zero."""
    if w % 2:
        raise ValueError("weight must be even")
    k = w // 2
    eps = k % 2
    m = k // 2 - eps
    return eps, m, (m // 3 if m >= 0 else -1)


def lemma_solutions(k: int):
    """All (i6, i4, i12) with 2 i4 + 3 i6 + 6 i12 = k and i6 in {0, 1}."""
    if k <= 1:
        raise ValueError("k must exceed 1")
    eps, m, jmax = weight_params(2 * k)
    return [(eps, m - 3 * j, j) for j in range(jmax + 1)]


def dimension(w: int) -> int:
    return weight_params(w)[2] + 1


@dataclass
class WeightBasis:
    w: int
    eps: int
    m: int
    jmax: int
    entries: list
    multiplications: int = 0


def build_basis(w: int, E4, E6, Delta, jmax=None, mul=operator.mul) -> WeightBasis:
    """All P_{w,j} for 0 <= j <= j_max with at most 3 j_max + 2 products."""
    eps, m, full = weight_params(w)
    jmax = full if jmax is None else min(jmax, full)
    if jmax < 0:
        return WeightBasis(w, eps, m, jmax, [])
    count = 0
    low = m - 3 * jmax  # 0, 1 or 2
    e4sq = None
    if jmax > 0 or low == 2:
        e4sq = mul(E4, E4)
        count += 1
    cube = None
    if jmax > 0:
        cube = mul(e4sq, E4)
        count += 1
    base = None
    if low == 1:
        base = E4
    elif low == 2:
        base = e4sq
    if eps:
        base = E6 if base is None else mul(base, E6)
        count += int(low > 0)
    # Q[j] = E6^eps E4^(m-3j), built from the top index downwards
    Q = [None] * (jmax + 1)
    Q[jmax] = base
    for j in range(jmax - 1, -1, -1):
        Q[j] = cube if Q[j + 1] is None else mul(Q[j + 1], cube)
        count += Q[j + 1] is not None
    entries = []
    dpow = None
    for j in range(jmax + 1):
        if j == 1:
            dpow = Delta
        elif j > 1:
            dpow = mul(dpow, Delta)
            count += 1
        if j == 0:
            entries.append(Q[0] if Q[0] is not None else _one_like(E4))
        elif Q[j] is None:
            entries.append(dpow)
        else:
            entries.append(mul(Q[j], dpow))
            count += 1
    return WeightBasis(w, eps, m, jmax, entries, count)


def _one_like(x):
    if isinstance(x, QSeries):
        return QSeries([1] + [0] * (x.prec - 1), x.ring)
    return x * 0 + 1


def grid_index_set(psi: int, k: int):
    """Union over r = 1..psi of the exponent triples needed for weight 2kr."""
    out = set()
    for r in range(1, psi + 1):
        if k * r > 1:
            for i6, i4, i12 in lemma_solutions(k * r):
                out.add((i6, i4, i12))
    return out


@dataclass
class SharedGrid:
    k: int
    psi: int
    values: dict = field(default_factory=dict)
    multiplications: int = 0

    def basis(self, w: int):
        """The P_{w,j} list for a weight w = 2 k r taken from the grid."""
        eps, m, jmax = weight_params(w)
        return [self.values[(eps, m - 3 * j, j)] for j in range(jmax + 1)]


def build_shared_grid(psi: int, k: int, E4, E6, Delta, mul=operator.mul) -> SharedGrid:
    """Every E6^eps E4^x Delta^y needed by the weights 2kr, r = 1..psi, computed once.

    Points are visited by increasing abscissa; each is the previous point of
    its row times a cached power of E4, so every grid point costs one product.
    """
    grid = SharedGrid(k, psi)
    needed = grid_index_set(psi, k)
    e4pow = {1: E4}

    def power_of_e4(e):
        if e not in e4pow:
            half = power_of_e4(e // 2)
            v = mul(half, half)
            grid.multiplications += 1
            if e % 2:
                v = mul(v, E4)
                grid.multiplications += 1
            e4pow[e] = v
        return e4pow[e]

    for eps in (0, 1):
        pts = sorted((x, y) for (e, x, y) in needed if e == eps)
        if not pts:
            continue
        ymax = max(y for _, y in pts)
        column = [E6 if eps else None]
        for y in range(1, ymax + 1):
            prev = column[-1]
            column.append(Delta if prev is None else mul(prev, Delta))
            grid.multiplications += prev is not None
        row_last: dict = {}
        for x, y in pts:
            key = (eps, x, y)
            if x == 0:
                grid.values[key] = column[y] if column[y] is not None else _one_like(E4)
            elif y in row_last and (x - row_last[y]) > 0:
                lx = row_last[y]
                grid.values[key] = mul(grid.values[(eps, lx, y)], power_of_e4(x - lx))
                grid.multiplications += 1
            elif column[y] is None:
                grid.values[key] = power_of_e4(x)
            else:
                grid.values[key] = mul(column[y], power_of_e4(x))
                grid.multiplications += 1
            row_last[y] = x
    return grid


def express_form(f: QSeries, w: int, basis=None):
    """Coefficients (c_0..c_jmax) with f = sum c_j P_{w,j}, by subtraction cascade.

    Every coefficient of f beyond j_max is used as a consistency check.
    """
    eps, m, jmax = weight_params(w)
    if f.val < 0:
        raise ValueError("expected a power series")
    if f.prec <= jmax:
        raise NotInSpan(f"order {f.prec} too small for weight {w}")
    if basis is None:
        T = f.prec
        basis = build_basis(w, eisenstein_series(2, T, f.ring), eisenstein_series(3, T, f.ring),
                            delta_series(T, f.ring)).entries
    g = [f[n] for n in range(f.prec)]
    ring = f.ring
    out = []
    for j in range(jmax + 1):
        c = g[j]
        out.append(c)
        if c:
            P = basis[j]
            for n in range(j, len(g)):
                g[n] -= c * P[n]
            if ring.characteristic:
                p = ring.characteristic
                g = [v % p for v in g]
    if any(g):
        first = next(i for i, v in enumerate(g) if v)
        raise NotInSpan(f"residual at q^{first} after weight-{w} cascade")
    return out


def point_rows(w: int, E4, E6, Delta, p=None):
    """Row (P_{w,0}, ..., P_{w,jmax}) at one sample point, optionally mod p."""
    eps, m, jmax = weight_params(w)
    if p is None:
        return [E6 ** eps * E4 ** (m - 3 * j) * Delta ** j for j in range(jmax + 1)]
    return [pow(E6, eps, p) * pow(E4, m - 3 * j, p) * pow(Delta, j, p) % p for j in range(jmax + 1)]
