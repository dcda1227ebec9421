"""Fricke polynomials by floating-point evaluation and interpolation.

At each node tau = rho i the ell + 1 roots are evaluated numerically and their
power sums sigma_t give one linear equation sum_j u_{t,j} P_{wt,j}(q) = sigma_t
per t.  Once a system has one equation more than unknowns it is solved by least
squares, the solution is rounded, and Newton's identities finish the job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .core import TriPoly, newton_to_coefficients
from .eisenval import EvalContext, evaluate_conjugate_values, evaluate_many_T, eisenstein_from_T, truncation_terms
from .formbasis import point_rows, weight_params
from .rings import QQ

KMAX = {2: 1, 4: 2, 6: 3}


class RoundingFailure(ArithmeticError):
    """A solved coefficient is not close enough to an integer."""


class IllConditioned(ArithmeticError):
    """The accumulated system is singular at the working precision."""


@dataclass
class SystemAccumulator:
    t: int
    weight: int
    unknowns: int
    rows: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    solution: list | None = None
    residual: object = None

    @property
    def solved(self) -> bool:
        return self.solution is not None

    def add(self, row, value):
        self.rows.append(row)
        self.rhs.append(value)


def solve_accumulated(S: SystemAccumulator, extra: int = 1, prec: int | None = None):
    """Least-squares solve once #rows >= #unknowns + extra; None while still short.

    Raises IllConditioned when the residual is not tiny relative to the data.
    """
    if S.unknowns == 0:
        S.solution = []
        return S.solution
    if len(S.rows) < S.unknowns + extra:
        return None
    prec = prec or mpmath.mp.prec
    A = mpmath.matrix(S.rows)
    b = mpmath.matrix(S.rhs)
    if len(S.rows) == S.unknowns:
        x = mpmath.lu_solve(A, b)
        res = mpmath.mpf(0)
    else:
        x, res = mpmath.qr_solve(A, b)
    scale = max(abs(v) for v in S.rhs) or 1
    if res > scale * mpmath.mpf(2) ** (-prec // 2):
        raise IllConditioned(f"residual {mpmath.nstr(res, 5)} for sigma_{S.t}")
    S.solution = [x[i] for i in range(S.unknowns)]
    S.residual = res
    return S.solution


def round_to_integers(values, tol=0.01):
    out = []
    for v in values:
        r = int(mpmath.nint(v))
        if abs(v - r) > tol:
            raise RoundingFailure(f"{mpmath.nstr(v, 20)} is not within {tol} of an integer")
        out.append(r)
    return out


def working_precision(ell: int, w: int, guard: int = 64) -> int:
    return math.ceil(w * (ell + 1) * math.log2(ell)) + guard


def node_values(ell: int, w: int, rho, ctx: EvalContext):
    """(roots, E4, E6, Delta) at tau = rho i; roots[0] is the main root."""
    prec = ctx.prec
    kmax = KMAX[w]
    eps = mpmath.mpf(2) ** (-prec - 8)
    z = mpmath.exp(-2 * mpmath.pi * mpmath.mpf(rho) / ell)
    q = z ** ell
    ql = q ** ell
    Tq = evaluate_many_T(q, truncation_terms(q, eps), 3)
    E2, E4, E6 = eisenstein_from_T(*Tq)
    Delta = q * Tq[0] ** 24
    Tl = evaluate_many_T(ql, truncation_terms(ql, eps, kmax), kmax)
    Tc = evaluate_conjugate_values(ell, z, truncation_terms(z, eps, kmax), ctx.xi, kmax)
    conj = []
    for h in range(ell):
        e2, e4, e6 = eisenstein_from_T(*(Tc[k][h] for k in range(kmax + 1)))
        conj.append({2: e2, 4: e4, 6: e6}[w])
    main_e = eisenstein_from_T(*Tl)
    if w == 2:
        main = ell * (ell * main_e[0] - E2) / 2
        conj = [(c - ell * E2) / 2 for c in conj]
    elif w == 4:
        main = -3 * ell ** 4 * main_e[1]
        conj = [-3 * c for c in conj]
    else:
        main = -2 * ell ** 6 * main_e[2]
        conj = [-2 * c for c in conj]
    return [main] + conj, E4, E6, Delta


def rho_nodes(step=0.1, start=1.0):
    i = 1
    while True:
        yield mpmath.mpf(start) + i * mpmath.mpf(step)
        i += 1


def accumulate_systems(ell: int, w: int, prec: int, rho_step=0.1, extra: int = 1):
    """Feed nodes until every sigma_t system is solved; returns the accumulators."""
    with mpmath.workprec(prec):
        ctx = EvalContext(prec, ell)
        systems = []
        for t in range(1, ell + 2):
            eps, m, jmax = weight_params(w * t)
            systems.append(SystemAccumulator(t, w * t, jmax + 1))
        max_unknowns = max(S.unknowns for S in systems)
        for S in systems:
            solve_accumulated(S, extra, prec)
        limit = 1.0 + rho_step * (3 * max_unknowns + 3 * extra)
        for rho in rho_nodes(rho_step):
            if all(S.solved for S in systems):
                break
            if rho > limit or rho >= 5:
                raise IllConditioned(f"systems still unsolved at rho = {float(rho):.2f}")
            roots, E4, E6, Delta = node_values(ell, w, rho, ctx)
            powers = [mpmath.mpf(1)] * len(roots)
            for S in systems:
                powers = [p * r for p, r in zip(powers, roots)]
                if S.solved:
                    continue
                sigma = mpmath.re(mpmath.fsum(powers))
                S.add(point_rows(S.weight, E4, E6, Delta), sigma)
                solve_accumulated(S, extra, prec)
        return systems


def compute_fricke_float(ell: int, w: int, guard: int = 64, rho_step=0.1, tol=0.01,
                         attempts: int = 4) -> TriPoly:
    """U (w=2), V (w=4) or W (w=6) for prime ell > 3, exact after rounding."""
    family = {2: "U", 4: "V", 6: "W"}[w]
    for _ in range(attempts):
        prec = working_precision(ell, w, guard)
        try:
            systems = accumulate_systems(ell, w, prec, rho_step)
            forms = []
            with mpmath.workprec(prec):
                for S in systems:
                    eps, m, jmax = weight_params(S.weight)
                    coeffs = round_to_integers(S.solution, tol)
                    forms.append(TriPoly({(0, m - 3 * j, eps, j): c for j, c in enumerate(coeffs)}, QQ))
            break
        except (RoundingFailure, IllConditioned):
            guard *= 2
    else:
        raise RoundingFailure(f"no stable rounding for ell={ell}, w={w} up to {guard} guard bits")
    coeffs = newton_to_coefficients(forms)
    n = ell + 1
    terms = {(n, 0, 0, 0): 1}
    for k, c in enumerate(coeffs, start=1):
        for (_, a, b, d), v in c.terms.items():
            terms[(n - k, a, b, d)] = v
    return TriPoly(terms, QQ, ell, w, family).integral()
