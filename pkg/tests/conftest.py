"""Shared independent oracles for the test suite.

These deliberately use different algorithms from the package internals:
plain triple enumeration for reduced forms, a fixed-length q-expansion
through E6 and (E4^3 - E6^2)/1728 for j, a pure-Python Kronecker symbol,
and brute primality by trial division.
"""

from __future__ import annotations

import math

from mpmath import mp, mpc


def oracle_reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Literal scan of all (a, b, c) with |b| <= a <= c, b^2 - 4ac = D."""
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (-b == a or a == c):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
    return sorted(out)


def oracle_class_number(D: int) -> int:
    return len(oracle_reduced_forms(D))


def oracle_j(tau, prec: int = 220, terms: int = 55):
    """j by the textbook route: E4^3 / ((E4^3 - E6^2)/1728), fixed 55 terms.

    Only valid for tau already in (or near) the fundamental domain, which is
    all the oracle cases need.
    """
    with mp.workprec(prec):
        q = mp.exp(2j * mp.pi * mpc(tau))
        e4 = mpc(1)
        e6 = mpc(1)
        for n in range(1, terms + 1):
            s3 = sum(d ** 3 for d in range(1, n + 1) if n % d == 0)
            s5 = sum(d ** 5 for d in range(1, n + 1) if n % d == 0)
            e4 += 240 * s3 * q ** n
            e6 -= 504 * s5 * q ** n
        delta = (e4 ** 3 - e6 ** 2) / 1728
        return e4 ** 3 / delta


def oracle_kronecker(a: int, n: int) -> int:
    """Pure-Python Kronecker symbol by quadratic reciprocity."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n % 2 == 0 and a % 2 == 0:
        return 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # factor out twos of n: (a/2) = 0, 1, -1 per a mod 8
    while n % 2 == 0:
        n //= 2
        if a % 8 in (3, 5):
            sign = -sign
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a, n = n % a, a
    return sign if n == 1 else 0


def oracle_is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def oracle_psi(n: int) -> int:
    """|P^1(Z/n)| by enumeration: primitive pairs divided by the unit count."""
    pairs = sum(
        1
        for u in range(n)
        for v in range(n)
        if math.gcd(math.gcd(u, v), n) == 1
    )
    phi = sum(1 for u in range(1, n + 1) if math.gcd(u, n) == 1)
    assert pairs % phi == 0
    return pairs // phi
