"""Generate Hilbert class polynomial fixtures with mpmath.

Usage: python tools/gen_classpoly.py D [D ...]

Writes src/fricke/data/classpoly_<|D|>.txt in the format read by
``fricke.volcano.classpoly``: first line "D h", then the h + 1 integer
coefficients from the leading one down to the constant term.
"""

import math
import sys
from pathlib import Path

import mpmath

OUT = Path(__file__).resolve().parent.parent / "src" / "fricke" / "data"


def reduced_forms(D):
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_polynomial(D):
    forms = reduced_forms(D)
    digits = sum(math.pi * math.sqrt(-D) / a for a, _, _ in forms) / math.log(10)
    mpmath.mp.dps = int(digits) + 60
    coeffs = [mpmath.mpc(1)]
    for a, b, _ in forms:
        tau = (-b + mpmath.sqrt(mpmath.mpf(D))) / (2 * a)
        j = 1728 * mpmath.kleinj(tau)
        new = [mpmath.mpc(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i] += c
            new[i + 1] -= c * j
        coeffs = new
    out = []
    for c in coeffs:
        r = int(mpmath.nint(c.real))
        if abs(c.real - r) > mpmath.mpf("1e-20") or abs(c.imag) > mpmath.mpf("1e-20"):
            raise ArithmeticError(f"insufficient precision for D={D}")
        out.append(r)
    return out


def main(argv):
    OUT.mkdir(parents=True, exist_ok=True)
    for arg in argv:
        D = int(arg)
        coeffs = class_polynomial(D)
        h = len(coeffs) - 1
        path = OUT / f"classpoly_{-D}.txt"
        path.write_text(f"{D} {h}\n" + "\n".join(map(str, coeffs)) + "\n")
        print(f"D={D} h={h} -> {path.name}")


if __name__ == "__main__":
    main(sys.argv[1:])
