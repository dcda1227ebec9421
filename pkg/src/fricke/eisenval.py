"""Multiprecision values of E2, E4, E6, Delta and j.

The workhorse is the family of pentagonal series

    T_{2k}(q) = 1 + sum_{n >= 1} (-1)^n ((6n-1)^{2k} q^{n(3n-1)/2} + (6n+1)^{2k} q^{n(3n+1)/2})

with T_0 = (q; q)_inf, E2 = T_2/T_0 and E4, E6 recovered from T_4/T_0, T_6/T_0.
All T_{2k} of one argument share a single table of powers of q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp


def truncation_terms(absq, target_error, kmax: int = 3) -> int:
    """Smallest N such that the first omitted pentagonal pair is below target_error.

    The series is alternating with decreasing terms, so the omitted tail is
    bounded by ((6N-1)^{2k} + (6N+1)^{2k}) |q|^{N(3N-1)/2}.
    """
    absq = mpmath.mpf(absq)
    if not 0 < absq < 1:
        raise ValueError("|q| must lie in (0, 1)")
    target = mpmath.mpf(target_error)
    logq = mpmath.log(absq)
    N = 1
    while True:
        bound = ((6 * N - 1) ** (2 * kmax) + (6 * N + 1) ** (2 * kmax)) * mpmath.exp(logq * N * (3 * N - 1) / 2)
        if bound < target:
            return N
        N += 1


@dataclass
class PowerTable:
    """Known powers Q[c] = q^c, extended by Algorithm-6 style decompositions."""

    q: object
    Q: dict = field(default_factory=dict)
    multiplications: int = 0
    fallbacks: int = 0

    def __post_init__(self):
        self.Q.setdefault(1, self.q)

    @property
    def A(self):
        return set(self.Q)

    def get(self, c: int):
        """q^c as 2a, a+b or 2a+b over known exponents, else binary powering."""
        Q = self.Q
        if c in Q:
            return Q[c]
        if c % 2 == 0 and c // 2 in Q:
            v = Q[c // 2] ** 2
            self.multiplications += 1
        else:
            v = None
            for a in sorted(Q, reverse=True):
                if c - a in Q:
                    v = Q[a] * Q[c - a]
                    self.multiplications += 1
                    break
            if v is None:
                for b in sorted(Q):
                    h = c - b
                    if h > 0 and h % 2 == 0 and h // 2 in Q:
                        v = Q[h // 2] ** 2 * Q[b]
                        self.multiplications += 2
                        break
            if v is None:
                self.fallbacks += 1
                v = self.q ** c
        Q[c] = v
        return v


def find_power_in_table(A, Q, c):
    """q^c from the table (A, Q); A and Q are updated in place."""
    table = PowerTable(Q[1], Q)
    v = table.get(c)
    A.add(c)
    return v


def pentagonal_pairs(N: int):
    """(n, n(3n-1)/2, n(3n+1)/2) for 1 <= n < N."""
    return [(n, n * (3 * n - 1) // 2, n * (3 * n + 1) // 2) for n in range(1, N)]


def evaluate_many_T(q, N: int, kmax: int = 3, table: PowerTable | None = None):
    """[T_0, T_2, ..., T_{2 kmax}] at q, truncated to N pentagonal pairs."""
    table = table or PowerTable(q)
    acc = [mpmath.mpf(0)] * (kmax + 1) if not isinstance(q, mpmath.mpc) else [mpmath.mpc(0)] * (kmax + 1)
    for n, c1, c2 in pentagonal_pairs(N):
        x1, x2 = table.get(c1), table.get(c2)
        a, b = 6 * n - 1, 6 * n + 1
        sign = -1 if n % 2 else 1
        for k in range(kmax + 1):
            acc[k] += sign * (a ** (2 * k) * x1 + b ** (2 * k) * x2)
    return [1 + s for s in acc]


@dataclass
class EvalContext:
    """Working precision plus the ell-th roots of unity used by conjugate orbits."""

    prec: int
    ell: int = 1
    xi: list = field(default_factory=list)

    def __post_init__(self):
        with mpmath.workprec(self.prec):
            self.xi = [mpmath.expjpi(mpmath.mpf(2 * h) / self.ell) for h in range(self.ell)]


def evaluate_conjugate_values(ell: int, z, N: int, xi, kmax: int = 3):
    """T[k][h] = T_{2k}(z xi_h) for real z; the powers z^c are shared across h."""
    table = PowerTable(z)
    acc = [[mpmath.mpc(0)] * ell for _ in range(kmax + 1)]
    for n, c1, c2 in pentagonal_pairs(N):
        x1, x2 = table.get(c1), table.get(c2)
        a, b = 6 * n - 1, 6 * n + 1
        sign = -1 if n % 2 else 1
        for h in range(ell):
            t1 = x1 * xi[h * c1 % ell]
            t2 = x2 * xi[h * c2 % ell]
            for k in range(kmax + 1):
                acc[k][h] += sign * (a ** (2 * k) * t1 + b ** (2 * k) * t2)
    return [[1 + v for v in row] for row in acc]


def eisenstein_from_T(T0, T2, T4=None, T6=None):
    """(E2, E4, E6) from the pentagonal series; E4/E6 are None when not supplied."""
    if T0 == 0:
        raise ZeroDivisionError("T_0 vanishes")
    E2 = T2 / T0
    E4 = E6 = None
    if T4 is not None:
        E4 = (3 * E2 ** 2 - T4 / T0) / 2
    if T6 is not None:
        E6 = (T6 / T0 - 15 * E2 ** 3 + 30 * E2 * E4) / 16
    return E2, E4, E6


def eisenstein_values(q, target_bits: int | None = None):
    """(E2, E4, E6, Delta) at a real or complex q with |q| < 1."""
    bits = target_bits or mp.prec
    N = truncation_terms(abs(q), mpmath.mpf(2) ** (-bits - 8))
    T0, T2, T4, T6 = evaluate_many_T(q, N, 3)
    E2, E4, E6 = eisenstein_from_T(T0, T2, T4, T6)
    return E2, E4, E6, q * T0 ** 24


def j_value(q):
    _, E4, E6, D = eisenstein_values(q)
    return E4 ** 3 / D


def theta_values(q1, precision: int | None = None):
    """(theta_2, theta_3, theta_4) at the nome q1 = exp(i pi tau), by direct summation."""
    bits = precision or mp.prec
    eps = mpmath.mpf(2) ** (-bits - 8)
    absq = abs(q1)
    logq = mpmath.log(absq)
    # theta_3, theta_4: sum over n^2; theta_2: 2 q1^(1/4) sum over n(n+1)
    t3 = t4 = mpmath.mpf(1)
    n = 1
    while True:
        if n * n * logq < mpmath.log(eps):
            break
        term = 2 * q1 ** (n * n)
        t3 += term
        t4 += (-1) ** n * term
        n += 1
    s = 0
    n = 0
    while n * (n + 1) * logq >= mpmath.log(eps):
        s += q1 ** (n * (n + 1))
        n += 1
    t2 = 2 * mpmath.power(q1, mpmath.mpf(1) / 4) * s
    return t2, t3, t4


def e46_from_theta(a, b, c):
    """(E4, E6, Delta) from theta_2, theta_3, theta_4."""
    a4, b4, c4 = a ** 4, b ** 4, c ** 4
    E4 = (a4 ** 2 + b4 ** 2 + c4 ** 2) / 2
    E6 = (a4 + b4) * (b4 + c4) * (c4 - a4) / 2
    D = (a * b * c / 2) ** 8
    return E4, E6, D


def values_at_rho(rho, prec: int):
    """E2, E4, E6, Delta, j at tau = rho i."""
    with mpmath.workprec(prec):
        q = mpmath.exp(-2 * mpmath.pi * mpmath.mpf(rho))
        E2, E4, E6, D = eisenstein_values(q, prec)
        return {"E2": E2, "E4": E4, "E6": E6, "Delta": D, "j": E4 ** 3 / D}


__all__ = [
    "EvalContext",
    "PowerTable",
    "e46_from_theta",
    "eisenstein_from_T",
    "eisenstein_values",
    "evaluate_conjugate_values",
    "evaluate_many_T",
    "find_power_in_table",
    "j_value",
    "theta_values",
    "truncation_terms",
    "values_at_rho",
]
