"""Affine arithmetic on y^2 = x^3 + A x + B over GF(p); ``None`` is the point at infinity."""

from __future__ import annotations

from sympy.ntheory import sqrt_mod


class Curve:
    __slots__ = ("A", "B", "p")

    def __init__(self, A: int, B: int, p: int):
        self.A, self.B, self.p = int(A) % p, int(B) % p, int(p)
        if (4 * pow(self.A, 3, p) + 27 * self.B * self.B) % p == 0:
            raise ValueError("singular curve")

    def __repr__(self):
        return f"[{self.A}, {self.B}] mod {self.p}"

    def __eq__(self, other):
        return isinstance(other, Curve) and (self.A, self.B, self.p) == (other.A, other.B, other.p)

    def __hash__(self):
        return hash((self.A, self.B, self.p))

    @property
    def j(self) -> int:
        p = self.p
        num = 1728 * 4 * pow(self.A, 3, p)
        den = (4 * pow(self.A, 3, p) + 27 * self.B * self.B) % p
        return num * pow(den, -1, p) % p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.A * x + self.B) % self.p

    def contains(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - self.rhs(x)) % self.p == 0

    def random_point(self, rng):
        p = self.p
        while True:
            x = rng.randrange(p)
            r = self.rhs(x)
            if r == 0:
                return (x, 0)
            y = sqrt_mod(r, p)
            if y is not None:
                return (x, y if rng.random() < 0.5 else (-y) % p)

    def neg(self, P):
        return None if P is None else (P[0], (-P[1]) % self.p)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        p = self.p
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            lam = (3 * x1 * x1 + self.A) * pow(2 * y1, -1, p) % p
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (lam * lam - x1 - x2) % p
        return (x3, (lam * (x1 - x3) - y1) % p)

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        R = None
        while k:
            if k & 1:
                R = self.add(R, P)
            k >>= 1
            if k:
                P = self.add(P, P)
        return R
