"""Exact data model shared by every pipeline.

Polynomials in X with coefficients that are modular forms live in one of two
variable sets:

* ``TriPoly``: monomials X^r E4^i4 E6^i6 Delta^i12, kept canonical with i6 in {0, 1}
  through E6^2 = E4^3 - 1728 Delta;
* ``ABPoly``: monomials X^r A^iA B^iB with A = -3 E4, B = -2 E6 (short Weierstrass
  coefficients of the Tate curve).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import gmpy2

from .rings import QQ, ZZ, PrimeField, Ring

FAMILIES = ("U", "V", "W", "A", "B")
# weight of the variable X for each family
X_WEIGHT = {"U": 2, "V": 4, "W": 6, "A": 2, "B": 2}


# --------------------------------------------------------------------------
# cosets of Gamma_0(N)


def prime_factors(n: int):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def psi(N: int) -> int:
    """Index of Gamma_0(N) in SL2(Z): N * prod_{p | N} (1 + 1/p)."""
    if N < 1:
        raise ValueError("N must be positive")
    value = N
    for p in prime_factors(N):
        value = value // p * (p + 1)
    return value


@dataclass(frozen=True)
class CosetMatrix:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"[{self.a},{self.b};{self.c},{self.d}]"


def _complete_row(c: int, d: int):
    """A matrix [a, b; c, d] of determinant one for coprime (c, d)."""
    g, x, y = _xgcd(d, c)
    # x d + y c = 1  =>  a = x, b = -y
    if g != 1:
        raise ValueError("bottom row is not primitive")
    return CosetMatrix(x, -y, c, d)


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def coset_representatives(N: int):
    """Right coset representatives of Gamma_0(N) in SL2(Z).

    Cosets are in bijection with the projective line over Z/NZ through the
    bottom row (c : d).  For prime N this gives [1,0;c,1] for 0 <= c < N and
    [0,-1;1,N].
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    reps = []
    seen = set()
    # bottom rows (c, 1) first, so every class containing one gets [1,0;c,1]
    rows = [(c, 1) for c in range(N)] + [(c, d) for c in range(N) for d in range(2, N + 1)]
    for c, d in rows:
        if gcd(c, d) != 1:
            continue
        key = _p1_normalise(c, d, N)
        if key in seen:
            continue
        seen.add(key)
        reps.append(CosetMatrix(1, 0, c, 1) if d == 1 else _complete_row(c, d))
    reps.sort(key=lambda m: (m.d != 1, m.c, m.d))
    if len(reps) != psi(N):
        raise AssertionError("coset enumeration is incomplete")
    return reps


def _p1_normalise(c: int, d: int, N: int):
    """Canonical representative of (c : d) in P^1(Z/NZ)."""
    best = None
    for u in range(1, N):
        if gcd(u, N) == 1:
            key = (u * c % N, u * d % N)
            if best is None or key < best:
                best = key
    return best if best is not None else (c % N, d % N)


def same_coset(m1: CosetMatrix, m2: CosetMatrix, N: int) -> bool:
    """True when m1 m2^{-1} lies in Gamma_0(N)."""
    # bottom-left entry of m1 * adj(m2)
    return (m1.c * m2.d - m1.d * m2.c) % N == 0


def reduce_matrix(M, N: int):
    """(A, B, D) with A D = N, 0 <= B < D and M Gamma-equivalent to [A, B; 0, D]."""
    a, b, c, d = M
    if a * d - b * c != N:
        raise ValueError(f"determinant is not {N}")
    A, u, v = _xgcd(a, c)
    D = N // A
    B = (u * b + v * d) % D
    return A, B, D


# --------------------------------------------------------------------------
# sparse polynomials


def _normalise(value, ring: Ring):
    if isinstance(ring, PrimeField):
        return value % ring.p
    if ring is ZZ and isinstance(value, Fraction):
        return ring(value)
    return value


def _add_into(target: dict, key, value, ring: Ring):
    v = _normalise(target.get(key, 0) + value, ring)
    if v:
        target[key] = v
    else:
        target.pop(key, None)


_E6SQ_CACHE: dict = {}


def _e6_square_power(h: int):
    """(E4^3 - 1728 Delta)^h as {(i4, i12): coeff}."""
    if h not in _E6SQ_CACHE:
        _E6SQ_CACHE[h] = {
            (3 * (h - k), k): math.comb(h, k) * (-1728) ** k for k in range(h + 1)
        }
    return _E6SQ_CACHE[h]


class TriPoly:
    """Polynomial in X, E4, E6, Delta with i6 in {0, 1}.

    ``weight_w`` is the weight of X; ``ell`` and ``family`` are descriptive
    metadata carried through arithmetic.
    """

    __slots__ = ("terms", "ring", "ell", "weight_w", "family")

    def __init__(self, terms=None, ring: Ring = ZZ, ell=None, weight_w: int = 2, family=None):
        self.ring = ring
        self.ell = ell
        self.weight_w = weight_w
        self.family = family
        canon: dict = {}
        for (r, i4, i6, i12), c in (terms or {}).items():
            c = ring(c)
            if not c:
                continue
            if i6 < 2:
                _add_into(canon, (r, i4, i6, i12), c, ring)
                continue
            for (a4, a12), k in _e6_square_power(i6 // 2).items():
                _add_into(canon, (r, i4 + a4, i6 % 2, i12 + a12), c * k, ring)
        self.terms = canon

    def _like(self, terms, ring=None):
        return TriPoly(terms, ring or self.ring, self.ell, self.weight_w, self.family)

    @classmethod
    def constant(cls, c, ring: Ring = ZZ, **meta):
        return cls({(0, 0, 0, 0): c}, ring, **meta)

    @classmethod
    def gen(cls, name: str, ring: Ring = ZZ, **meta):
        key = {"X": (1, 0, 0, 0), "E4": (0, 1, 0, 0), "E6": (0, 0, 1, 0), "D": (0, 0, 0, 1)}[name]
        return cls({key: 1}, ring, **meta)

    def __repr__(self):
        return f"TriPoly({self.to_text()})"

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, TriPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def with_meta(self, ell=None, weight_w=None, family=None):
        return TriPoly(self.terms, self.ring, ell if ell is not None else self.ell,
                       weight_w or self.weight_w, family or self.family)

    # arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TriPoly):
            other = TriPoly.constant(other, self.ring)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v, self.ring)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TriPoly):
            c = self.ring(other)
            return self._like({k: v * c for k, v in self.terms.items()})
        out: dict = {}
        for (r1, a1, b1, c1), v1 in self.terms.items():
            for (r2, a2, b2, c2), v2 in other.terms.items():
                key = (r1 + r2, a1 + a2, b1 + b2, c1 + c2)
                out[key] = out.get(key, 0) + v1 * v2
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, k: int):
        return self._like({key: self.ring.div(v, k) for key, v in self.terms.items()})

    def __pow__(self, e: int):
        result = TriPoly.constant(1, self.ring)
        for _ in range(e):
            result = result * self
        return self._like(result.terms)

    # structure -----------------------------------------------------------

    @property
    def degree(self) -> int:
        return max((k[0] for k in self.terms), default=-1)

    def coefficient(self, r: int) -> "TriPoly":
        """Coefficient of X^r, itself a form in E4, E6, Delta."""
        return self._like({(0,) + k[1:]: v for k, v in self.terms.items() if k[0] == r})

    def x_coefficients(self):
        return [self.coefficient(r) for r in range(self.degree + 1)]

    def monomials(self):
        return sorted(self.terms.items())

    def weights(self):
        """Set of total weights of the monomials."""
        w = self.weight_w
        return {w * r + 4 * a + 6 * b + 12 * c for (r, a, b, c) in self.terms}

    def is_monic(self) -> bool:
        d = self.degree
        return self.terms.get((d, 0, 0, 0)) == 1 and len(self.coefficient(d).terms) == 1

    def diff_x(self) -> "TriPoly":
        return self._like({(r - 1, a, b, c): r * v for (r, a, b, c), v in self.terms.items() if r})

    def map_ring(self, ring: Ring) -> "TriPoly":
        return self._like(dict(self.terms), ring)

    def integral(self) -> "TriPoly":
        """Move QQ coefficients to ZZ when all are integers."""
        if all(Fraction(v).denominator == 1 for v in self.terms.values()):
            return self._like({k: int(v) for k, v in self.terms.items()}, ZZ)
        return self

    def evaluate(self, x, e4, e6, delta):
        """Evaluate at arbitrary ring-like values (field elements, floats, series)."""
        cache = {}

        def power(base, name, e):
            key = (name, e)
            if key not in cache:
                if e == 0:
                    cache[key] = 1
                elif e == 1:
                    cache[key] = base
                else:
                    half = power(base, name, e // 2)
                    sq = half * half
                    cache[key] = sq * base if e % 2 else sq
            return cache[key]

        total = 0
        for (r, a, b, c), v in self.terms.items():
            term = v
            for base, name, e in ((x, "x", r), (e4, "e4", a), (e6, "e6", b), (delta, "d", c)):
                if e:
                    term = power(base, name, e) * term
            total = term + total
        return total

    # text and json --------------------------------------------------------

    def to_text(self) -> str:
        return _format_terms(self.terms, ("X", "E4", "E6", "D"))

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "ell": self.ell,
            "vars": "E4E6D",
            "monomials": [[list(k), str(v)] for k, v in self.monomials()],
        }


class ABPoly:
    """Polynomial in X, A, B."""

    __slots__ = ("terms", "ring", "ell", "family")

    def __init__(self, terms=None, ring: Ring = ZZ, ell=None, family=None):
        self.ring = ring
        self.ell = ell
        self.family = family
        out: dict = {}
        for k, v in (terms or {}).items():
            _add_into(out, tuple(k), ring(v), ring)
        self.terms = out

    def __eq__(self, other):
        if not isinstance(other, ABPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"ABPoly({self.to_text()})"

    @property
    def degree(self) -> int:
        return max((k[0] for k in self.terms), default=-1)

    def monomials(self):
        return sorted(self.terms.items())

    def map_ring(self, ring: Ring) -> "ABPoly":
        return ABPoly(self.terms, ring, self.ell, self.family)

    def evaluate(self, x, a, b):
        total = 0
        for (r, i, j), v in self.terms.items():
            total = total + v * x ** r * a ** i * b ** j
        return total

    def diff_x(self) -> "ABPoly":
        return ABPoly({(r - 1, i, j): r * v for (r, i, j), v in self.terms.items() if r},
                      self.ring, self.ell, self.family)

    def to_text(self) -> str:
        return _format_terms(self.terms, ("X", "A", "B"))

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "ell": self.ell,
            "vars": "AB",
            "monomials": [[list(k), str(v)] for k, v in self.monomials()],
        }


def _format_terms(terms: dict, names) -> str:
    """Human-readable display in descending X-degree."""
    if not terms:
        return "0"
    parts = []
    for key in sorted(terms, key=lambda k: (-k[0],) + tuple(-e for e in k[1:])):
        v = terms[key]
        factors = [f"{n}^{e}" if e > 1 else n for n, e in zip(names, key) if e]
        mono = "*".join(factors)
        sign = "-" if v < 0 else "+"
        mag = abs(v)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def poly_from_json(data: dict):
    ring = QQ if any("/" in c for _, c in data["monomials"]) else ZZ
    terms = {tuple(k): ring(Fraction(c)) for k, c in data["monomials"]}
    if data["vars"] == "AB":
        return ABPoly(terms, ring, data.get("ell"), data.get("family"))
    fam = data.get("family")
    return TriPoly(terms, ring, data.get("ell"), X_WEIGHT.get(fam, data.get("weight_w", 2)), fam)


def dump_poly(poly, meta=None) -> str:
    data = poly.to_json()
    if meta:
        data["meta"] = meta
    return json.dumps(data, indent=1, sort_keys=False)


# --------------------------------------------------------------------------
# (E4, E6, Delta) <-> (A, B)


def _ab_mul(t1: dict, t2: dict):
    out: dict = {}
    for (r1, a1, b1), v1 in t1.items():
        for (r2, a2, b2), v2 in t2.items():
            k = (r1 + r2, a1 + a2, b1 + b2)
            out[k] = out.get(k, 0) + v1 * v2
    return out


def to_ab_form(P: TriPoly) -> ABPoly:
    """Substitute E4 = -A/3, E6 = -B/2, Delta = -(4A^3 + 27B^2)/186624."""
    char_p = isinstance(P.ring, PrimeField)
    one = (lambda x: P.ring(x)) if char_p else Fraction
    delta = {(0, 3, 0): one(Fraction(-4, 186624)), (0, 0, 2): one(Fraction(-27, 186624))}
    dpow = [{(0, 0, 0): one(1)}]
    out: dict = {}
    for (r, i4, i6, i12), v in P.terms.items():
        while len(dpow) <= i12:
            dpow.append(_ab_mul(dpow[-1], delta))
        c = one(v) * one(Fraction(-1, 3)) ** i4 * one(Fraction(-1, 2)) ** i6
        for (_, a, b), w in dpow[i12].items():
            k = (r, a + i4, b + i6)
            out[k] = out.get(k, 0) + c * w
    if char_p:
        return ABPoly(out, P.ring, P.ell, P.family)
    if all(Fraction(v).denominator == 1 for v in out.values()):
        return ABPoly({k: int(v) for k, v in out.items()}, ZZ, P.ell, P.family)
    return ABPoly(out, QQ, P.ell, P.family)


def from_ab_form(P: ABPoly, weight_w: int = 2) -> TriPoly:
    """Substitute A = -3 E4, B = -2 E6 and canonicalise E6^2."""
    ring = P.ring
    terms = {}
    for (r, a, b), v in P.terms.items():
        terms[(r, a, b, 0)] = v * (-3) ** a * (-2) ** b
    return TriPoly(terms, ring, P.ell, weight_w, P.family)


# --------------------------------------------------------------------------
# Newton identities


def _default_div(a, k):
    if isinstance(a, int):
        return Fraction(a, k)
    return a / k


def newton_to_coefficients(power_sums, n=None, divide=_default_div):
    """Coefficients c_1..c_n of the monic polynomial whose roots have power sums p_1..p_n.

    Works for any element type with +, * and an exact division by small
    integers supplied through ``divide``.
    """
    p = list(power_sums)
    n = len(p) if n is None else n
    c = []
    for k in range(1, n + 1):
        acc = p[k - 1]
        for i in range(1, k):
            acc = acc + c[i - 1] * p[k - i - 1]
        c.append(divide(-acc, k))
    return c


def coefficients_to_power_sums(coeffs, n=None):
    """Inverse of newton_to_coefficients: p_k from c_1..c_n."""
    c = list(coeffs)
    n = len(c) if n is None else n
    p = []
    for k in range(1, n + 1):
        acc = -k * c[k - 1] if k <= len(c) else 0
        for i in range(1, k):
            if i <= len(c):
                acc = acc - c[i - 1] * p[k - i - 1]
        p.append(acc)
    return p


# --------------------------------------------------------------------------
# heights


def log_abs(v) -> float:
    v = Fraction(v)
    return math.log(abs(v.numerator)) - math.log(v.denominator)


def height(P) -> float:
    """Natural log of the largest coefficient in absolute value."""
    if not P.terms:
        raise ValueError("zero polynomial has no height")
    return max(log_abs(v) for v in P.terms.values())


def relative_height(P, ell: int) -> float:
    """H(P) / ((ell + 1) log ell), measured on the (X, A, B) form."""
    if isinstance(P, TriPoly):
        P = to_ab_form(P)
    return height(P) / ((ell + 1) * math.log(ell))


# --------------------------------------------------------------------------
# Chinese remaindering


def crt_combine(residues):
    """Symmetric-range integer congruent to each (value, prime) pair."""
    residues = list(residues)
    primes = [p for _, p in residues]
    if len(set(primes)) != len(primes):
        raise ValueError("duplicate moduli")
    x, m = 0, 1
    for v, p in residues:
        # x + m t = v mod p
        t = (v - x) * pow(m, -1, p) % p
        x += m * t
        m *= p
    return x - m if 2 * x > m else x


class CrtAccumulator:
    """Per-monomial CRT over a growing set of primes."""

    def __init__(self, bound_nats: float = 0.0):
        self.bound_nats = bound_nats
        self.primes: list = []
        self.residues: dict = {}
        self.modulus = 1

    def add(self, p: int, terms: dict):
        if p in self.primes:
            raise ValueError("prime already used")
        keys = set(self.residues) | set(terms)
        for k in keys:
            old = self.residues.get(k)
            v = terms.get(k, 0) % p
            if old is None:
                # monomial unseen so far means zero modulo the previous primes
                old = 0
            t = (v - old) * pow(self.modulus, -1, p) % p
            self.residues[k] = old + self.modulus * t
        self.primes.append(p)
        self.modulus *= p

    @property
    def enough(self) -> bool:
        return math.log(self.modulus) > self.bound_nats + math.log(2)

    def values(self) -> dict:
        m = self.modulus
        out = {}
        for k, x in self.residues.items():
            x %= m
            x = x - m if 2 * x > m else x
            if x:
                out[k] = x
        return out


def is_probable_prime(n: int) -> bool:
    return bool(gmpy2.is_prime(n))


def word_primes(count: int, floor: int = 1729, start: int = 1 << 62):
    """``count`` primes taken downward from ``start``, all above ``floor``."""
    out = []
    n = start
    while len(out) < count:
        n = _prev_prime(n)
        if n <= floor:
            raise ValueError("ran out of primes")
        out.append(n)
    return out


def _prev_prime(n: int) -> int:
    n -= 1
    while not is_probable_prime(n):
        n -= 1
    return n


# --------------------------------------------------------------------------
# linear algebra over GF(p)


class SingularSystem(ArithmeticError):
    """The linear system does not determine a unique solution."""


class InconsistentSystem(ArithmeticError):
    """The overdetermined linear system has no solution."""


def row_echelon_mod_p(rows, p: int):
    """Reduced row echelon form of a matrix mod p; returns (matrix, pivot columns)."""
    M = [[v % p for v in row] for row in rows]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][col], -1, p)
        M[r] = [v * inv % p for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col]:
                f = M[i][col]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank_mod_p(rows, p: int) -> int:
    return len(row_echelon_mod_p(rows, p)[1]) if rows else 0


def solve_mod_p(rows, rhs, p: int):
    """Unique solution of rows * x = rhs mod p, checking every extra equation."""
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    M, pivots = row_echelon_mod_p(aug, p)
    if n in pivots:
        raise InconsistentSystem("overdetermined system has no solution")
    if len(pivots) < n:
        raise SingularSystem(f"rank {len(pivots)} < {n} unknowns")
    return [M[i][n] for i in range(n)]
