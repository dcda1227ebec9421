"""Coefficient rings used by the exact pipelines: ZZ, QQ and GF(p).

A ring object only knows how to normalise, invert and divide its elements;
elements themselves are plain Python ``int`` or ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class Ring:
    name = "ring"
    characteristic = 0

    def __call__(self, x):
        raise NotImplementedError

    def div(self, a, k):
        """Exact division of ``a`` by the integer ``k``."""
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == 0

    def __repr__(self) -> str:
        return self.name


class IntegerRing(Ring):
    name = "ZZ"

    def __call__(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def div(self, a, k):
        q, r = divmod(a, k)
        if r:
            raise ArithmeticError(f"{a} is not divisible by {k}")
        return q

    def inv(self, a):
        if a in (1, -1):
            return a
        raise ArithmeticError(f"{a} is not a unit in ZZ")


class RationalField(Ring):
    name = "QQ"

    def __call__(self, x):
        return Fraction(x)

    def div(self, a, k):
        return Fraction(a) / k

    def inv(self, a):
        return 1 / Fraction(a)


class PrimeField(Ring):
    def __init__(self, p: int):
        if p < 2:
            raise ValueError("modulus must be a prime")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def div(self, a, k):
        if k % self.p == 0:
            raise ZeroDivisionError(f"{k} is not invertible mod {self.p}")
        return a * pow(k, -1, self.p) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def signed(self, a) -> int:
        """Symmetric representative in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if 2 * a > self.p else a

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


ZZ = IntegerRing()
QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)
