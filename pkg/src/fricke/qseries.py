"""Truncated q-expansions over ZZ, QQ or GF(p) and the classical level-one series.

A ``QSeries`` stores the coefficients of q^v .. q^(T-1); ``T`` is the absolute
truncation order (the first unknown exponent).  Arithmetic never extends
precision: the result of an operation is known only as far as both operands.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import gmpy2

from .rings import QQ, ZZ, PrimeField, Ring

_SCHOOLBOOK_CUTOFF = 24


def _pack(values, slot_bits):
    nbytes = slot_bits // 8
    return int.from_bytes(b"".join(v.to_bytes(nbytes, "little") for v in values), "little")


def _unpack(x, slot_bits, n):
    nbytes = slot_bits // 8
    raw = x.to_bytes(max(nbytes * n, (x.bit_length() + 7) // 8), "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(n)]


def _kronecker_nonneg(a, b, n, bound):
    """First n coefficients of a*b for non-negative integer sequences.

    ``bound`` bounds every entry of both inputs.
    """
    terms = min(len(a), len(b), n)
    slot = 2 * bound.bit_length() + terms.bit_length() + 1
    slot = (slot + 7) // 8 * 8
    prod = gmpy2.mpz(_pack(a[:n], slot)) * gmpy2.mpz(_pack(b[:n], slot))
    return _unpack(int(prod), slot, n)


def _schoolbook(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
    return out


def _mul_int(a, b, n):
    """Truncated product of signed integer sequences via one Kronecker product."""
    a = list(a[:n]) + [0] * (n - len(a[:n]))
    b = list(b[:n]) + [0] * (n - len(b[:n]))
    m = max(max(map(abs, a)), max(map(abs, b))) + 1
    # shift both inputs by m so the packed integers are non-negative
    prod = _kronecker_nonneg([x + m for x in a], [y + m for y in b], n, 2 * m)
    out = []
    sa = sb = 0
    for k in range(n):
        sa += a[k]
        sb += b[k]
        out.append(prod[k] - m * (sa + sb) - m * m * (k + 1))
    return out


def mul_coeffs(a, b, n, ring: Ring):
    """First ``n`` coefficients of the product of two coefficient sequences."""
    if n <= 0 or not len(a) or not len(b):
        return [0] * max(n, 0)
    if min(len(a), len(b), n) <= _SCHOOLBOOK_CUTOFF:
        out = _schoolbook(a, b, n)
        out += [0] * (n - len(out))
        return [ring(x) for x in out] if ring is not QQ else out
    if isinstance(ring, PrimeField):
        prod = _kronecker_nonneg(a, b, n, ring.p)
        p = ring.p
        return [x % p for x in prod]
    if ring is ZZ:
        return _mul_int(a, b, n)
    da = lcm(*(Fraction(x).denominator for x in a))
    db = lcm(*(Fraction(x).denominator for x in b))
    ia = [int(x * da) for x in a]
    ib = [int(x * db) for x in b]
    d = da * db
    return [Fraction(x, d) for x in _mul_int(ia, ib, n)]


class QSeries:
    """Immutable truncated Laurent series ``sum c_n q^n`` for val <= n < prec."""

    __slots__ = ("coeffs", "ring", "val")

    def __init__(self, coeffs, ring: Ring = ZZ, val: int = 0):
        self.ring = ring
        self.val = val
        self.coeffs = tuple(ring(c) for c in coeffs)

    @classmethod
    def _raw(cls, coeffs, ring, val=0):
        s = object.__new__(cls)
        s.coeffs = tuple(coeffs)
        s.ring = ring
        s.val = val
        return s

    @property
    def prec(self) -> int:
        return self.val + len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n: int):
        if n < self.val:
            return 0
        if n >= self.prec:
            raise IndexError(f"q^{n} is beyond the truncation order {self.prec}")
        return self.coeffs[n - self.val]

    def list(self):
        return list(self.coeffs)

    def __repr__(self):
        shown = []
        for i, c in enumerate(self.coeffs[:6]):
            if c:
                shown.append(f"{c}*q^{self.val + i}")
        return f"{' + '.join(shown) or '0'} + O(q^{self.prec})"

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.val, self.coeffs, self.prec) == (other.val, other.coeffs, other.prec)

    def __hash__(self):
        return hash((self.val, self.coeffs))

    def agrees(self, other, upto=None) -> bool:
        """True when both series have the same coefficients below ``upto``."""
        top = min(self.prec, other.prec) if upto is None else upto
        low = min(self.val, other.val)
        return all(self[n] == other[n] for n in range(low, top))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise ValueError("cannot extend precision")
        return QSeries._raw(self.coeffs[: max(prec - self.val, 0)], self.ring, self.val)

    def change_ring(self, ring: Ring) -> "QSeries":
        return QSeries(self.coeffs, ring, self.val)

    def _aligned(self, other):
        val = min(self.val, other.val)
        prec = min(self.prec, other.prec)
        a = [self[n] for n in range(val, prec)]
        b = [other[n] for n in range(val, prec)]
        return val, a, b

    def _coerce(self, other):
        if isinstance(other, QSeries):
            return other
        return QSeries([other], self.ring).extend_constant(self.prec)

    def extend_constant(self, prec):
        # constants are exact, so a constant may be padded to any order
        return QSeries._raw(list(self.coeffs) + [0] * (prec - self.prec), self.ring, self.val)

    def _norm(self, values):
        ring = self.ring
        if isinstance(ring, PrimeField):
            p = ring.p
            return [v % p for v in values]
        return values

    def __add__(self, other):
        other = self._coerce(other)
        val, a, b = self._aligned(other)
        return QSeries._raw(self._norm([x + y for x, y in zip(a, b)]), self.ring, val)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw(self._norm([-x for x in self.coeffs]), self.ring, self.val)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = self.ring(c)
        return QSeries._raw(self._norm([c * x for x in self.coeffs]), self.ring, self.val)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        if self.ring is not other.ring and self.ring != other.ring:
            raise TypeError("series over different rings")
        n = min(len(self.coeffs), len(other.coeffs))
        coeffs = mul_coeffs(self.coeffs, other.coeffs, n, self.ring)
        return QSeries._raw(coeffs, self.ring, self.val + other.val)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, QSeries):
            return self * k.inverse()
        ring = self.ring
        return QSeries._raw([ring.div(x, k) for x in self.coeffs], ring, self.val)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = QSeries._raw([1] + [0] * (len(self.coeffs) - 1), self.ring, 0)
        base = self
        first = True
        while e:
            if e & 1:
                result = base if first else result * base
                first = False
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; the leading coefficient must be a unit."""
        lead = self.coeffs[0] if self.coeffs else 0
        if not lead:
            raise ZeroDivisionError("leading coefficient is zero")
        ring = self.ring
        n = len(self.coeffs)
        inv0 = ring.inv(lead)
        # Newton iteration g <- g(2 - f g), doubling the known length each step
        g = [inv0]
        k = 1
        f = list(self.coeffs)
        while k < n:
            k = min(2 * k, n)
            fg = mul_coeffs(f[:k], g, k, ring)
            corr = [(-x) for x in fg]
            corr[0] += 2
            g = mul_coeffs(g, self._norm(corr), k, ring)
        return QSeries._raw(self._norm(g) if ring is not QQ else g, ring, -self.val)

    def subs_power(self, m: int) -> "QSeries":
        """f(q^m), known to order m * prec."""
        if self.val < 0:
            raise ValueError("substitution needs a power series")
        out = [0] * (m * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            out[m * i] = c
        return QSeries._raw(out, self.ring, m * self.val)

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k."""
        return QSeries._raw(self.coeffs, self.ring, self.val + k)

    def q_derivative(self) -> "QSeries":
        """q d/dq."""
        vals = [(self.val + i) * c for i, c in enumerate(self.coeffs)]
        return QSeries._raw(self._norm(vals), self.ring, self.val)

    def decimate(self, D: int, A: int = 1) -> "QSeries":
        """D * sum_n a_{Dn} q^{An}: the sum of f((tau + h)/D) over h, evaluated at A*tau."""
        if self.val != 0:
            raise ValueError("decimation needs a power series")
        count = (len(self.coeffs) + D - 1) // D
        top = (len(self.coeffs) * A) // D
        out = [0] * max(top, 1)
        for n in range(count):
            if A * n < len(out):
                out[A * n] = D * self.coeffs[D * n]
        return QSeries._raw(self._norm(out[:max(top, 1)]), self.ring, 0)


def divisor_power_sums(r: int, T: int, exclude: int = 0):
    """delta_r(n) for 0 <= n < T; divisors divisible by ``exclude`` are skipped."""
    out = [0] * T
    for d in range(1, T):
        if exclude and d % exclude == 0:
            continue
        dr = d ** r
        for n in range(d, T, d):
            out[n] += dr
    return out


_E_FACTOR = {1: -24, 2: 240, 3: -504}


def eisenstein_series(k: int, T: int, ring: Ring = ZZ) -> QSeries:
    """E_{2k} for k in {1, 2, 3} to order T."""
    c = _E_FACTOR[k]
    sig = divisor_power_sums(2 * k - 1, T)
    coeffs = [c * s for s in sig]
    coeffs[0] = 1
    return QSeries(coeffs, ring)


def pentagonal_exponents(bound: int):
    """(exponent, sign) pairs of Euler's pentagonal series below ``bound``."""
    out = [(0, 1)]
    n = 1
    while n * (3 * n - 1) // 2 < bound:
        sign = -1 if n % 2 else 1
        for e in (n * (3 * n - 1) // 2, n * (3 * n + 1) // 2):
            if e < bound:
                out.append((e, sign))
        n += 1
    return out


def euler_product(T: int, ring: Ring = ZZ) -> QSeries:
    """(q; q)_infinity to order T."""
    coeffs = [0] * T
    for e, s in pentagonal_exponents(T):
        coeffs[e] = s
    return QSeries(coeffs, ring)


def delta_series(T: int, ring: Ring = ZZ) -> QSeries:
    """Delta = q (q; q)^24, computed through the product so no division is needed."""
    if T <= 1:
        return QSeries([0] * max(T, 1), ring)
    eta = euler_product(T - 1, ring)
    return (eta ** 24).shift(1)


def j_series(T: int, ring: Ring = QQ) -> QSeries:
    """j = E4^3 / Delta with leading exponent -1, known for q^-1 .. q^(T-1)."""
    e4 = eisenstein_series(2, T + 1, ring)
    d = delta_series(T + 2, ring)
    unit = QSeries._raw(d.coeffs, ring, 0)  # Delta / q
    return (e4 ** 3 * unit.inverse()).shift(-1)


def fell_series(ell: int, T: int, ring: Ring = ZZ) -> QSeries:
    """-ell * F_ell = ell(ell-1) + 24 ell sum delta'_1(n) q^n, with F_ell = E2(q) - ell E2(q^ell)."""
    sig = divisor_power_sums(1, T, exclude=ell)
    coeffs = [24 * ell * s for s in sig]
    coeffs[0] = ell * (ell - 1)
    return QSeries(coeffs, ring)
