"""Independent reference computations the tests compare the library against.

Nothing here imports the package. Everything is deliberately naive: exact
rational arithmetic, exhaustive enumeration, and plain loops.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def eval_poly(coeffs, x, P):
    return sum(c * x**k for k, c in enumerate(coeffs)) % P


def interpolate_at_zero(points, P):
    """Lagrange interpolation over the rationals, then reduced mod P."""
    total = Fraction(0)
    for j, (xj, yj) in enumerate(points):
        term = Fraction(yj)
        for m, (xm, _) in enumerate(points):
            if m != j:
                term *= Fraction(xm, xm - xj)
        total += term
    return total.numerator * pow(total.denominator, -1, P) % P


def lagrange_coefficients(indices, P):
    out = []
    for j in indices:
        c = Fraction(1)
        for m in indices:
            if m != j:
                c *= Fraction(m, m - j)
        out.append(c.numerator * pow(c.denominator, -1, P) % P)
    return out


def is_prime_naive(n):
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def safe_primes_below(limit):
    return [p for p in range(5, limit) if is_prime_naive(p) and is_prime_naive((p - 1) // 2)]


def element_order(a, p):
    x, k = a % p, 1
    while x != 1:
        x, k = x * a % p, k + 1
    return k


def qr_subgroup(p):
    return sorted({x * x % p for x in range(1, p)})


def brute_dlog(g, target, p, bound):
    x = 1
    for z in range(bound + 1):
        if x == target:
            return z
        x = x * g % p
    return None


def consistent_secrets(known, t, P):
    """Secrets for which some degree-(t-1) polynomial passes through ``known``."""
    found = set()
    for coeffs in product(range(P), repeat=t):
        if all(eval_poly(coeffs, x, P) == y for x, y in known):
            found.add(coeffs[0])
    return found


def plain_sum(vectors):
    vectors = list(vectors)
    return [sum(col) for col in zip(*vectors)]
