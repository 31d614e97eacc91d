"""Classical modular polynomials Phi_n for cyclic n-isogenies.

Phi_n(X, Y) is the integer polynomial of degree psi(n) = n*prod_{p|n}(1+1/p)
in each variable vanishing exactly at pairs (j(E), j(E')) joined by a cyclic
n-isogeny.  It is computed by evaluation-interpolation: at base points tau_k
on the imaginary axis, the product of (X - j((a*tau_k + b)/d)) over the
psi(n) coset triples (a, b, d) [a*d = n, 0 <= b < d, gcd(a, b, d) = 1] gives
Phi_n(X, j(tau_k)); interpolating each X-coefficient through the nodes
j(tau_k) and rounding yields the integer coefficients, which are then
revalidated (symmetry, and for primes the Kronecker congruence
Phi_p = (X^p - Y)(X - Y^p) mod p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .errors import CeilingError, PrecisionError, ValidationError
from .moduli import j_eval
from .polys import BivarPoly, poly_json
from .quadorders import factorization

__all__ = [
    "ModularPoly",
    "DEFAULT_N_CEILING",
    "psi",
    "cyclic_cosets",
    "coset_j_values",
    "modular_poly",
    "kronecker_check",
    "functional_equation_residual",
    "modular_poly_json",
]

DEFAULT_N_CEILING = 13


def psi(n: int) -> int:
    """Degree of each projection of the cyclic-isogeny curve: n*prod(1+1/p)."""
    if not isinstance(n, int) or n <= 0:
        raise ValidationError(f"psi requires a positive integer, got {n}")
    out = n
    for p in factorization(n):
        out = out // p * (p + 1)
    return out


def cyclic_cosets(n: int) -> list[tuple[int, int, int]]:
    """Triples (a, b, d): a*d = n, 0 <= b < d, gcd(a, b, d) = 1; psi(n) of them."""
    if not isinstance(n, int) or n <= 0:
        raise ValidationError(f"cyclic_cosets requires a positive integer, got {n}")
    out = []
    for d in range(1, n + 1):
        if n % d:
            continue
        a = n // d
        for b in range(d):
            if math.gcd(math.gcd(a, b), d) == 1:
                out.append((a, b, d))
    return out


@dataclass(frozen=True)
class ModularPoly:
    """Phi_n with exact integer coefficients."""

    n: int
    P: BivarPoly
    prec: int

    def degrees(self) -> tuple[int, int]:
        return self.P.bidegree()


_modpoly_cache: dict[int, ModularPoly] = {}


def _interpolate_newton(nodes, values):
    """Monomial coefficients (highest-first) through (nodes[k], values[k]); mpc."""
    n = len(nodes)
    dd = list(values)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level])
    coeffs = [dd[n - 1]]
    for k in range(n - 2, -1, -1):
        coeffs = coeffs + [mpc(0)]
        for i in range(len(coeffs) - 2, -1, -1):  # descending: no aliasing
            coeffs[i + 1] -= coeffs[i] * nodes[k]
        coeffs[-1] += dd[k]
    return coeffs


def modular_poly(
    n: int,
    prec: int | None = None,
    ceiling: int = DEFAULT_N_CEILING,
    retries: int = 4,
) -> ModularPoly:
    """Exact Phi_n; evaluation-interpolation with precision escalation."""
    if not isinstance(n, int) or n <= 0:
        raise ValidationError(f"modular_poly requires a positive integer, got {n}")
    if n > ceiling:
        raise CeilingError(f"n = {n} exceeds the modular-polynomial ceiling {ceiling}")
    if prec is None and n in _modpoly_cache:
        return _modpoly_cache[n]
    if n == 1:
        P = BivarPoly({(1, 0): 1, (0, 1): -1})
        mpoly = ModularPoly(n=1, P=P, prec=prec or 64)
        _modpoly_cache.setdefault(1, mpoly)
        return mpoly

    deg = psi(n)
    cosets = cyclic_cosets(n)
    assert len(cosets) == deg
    base = prec if prec is not None else 256 + 64 * deg
    attempted = []
    for attempt in range(retries + 1):
        p = base << attempt
        attempted.append(p)
        wp = p + 32
        with mp.workprec(wp):
            # base points i*t_k with multiplicatively separated j-values
            ts = [mpf(1) + mpf(6 + 7 * k) / 100 for k in range(deg + 1)]
            taus = [mpc(0, t) for t in ts]
            ys = [j_eval(t, p) for t in taus]
            # product over cosets at each base point
            cols = []
            for tau in taus:
                roots = [j_eval((a * tau + b) / d, p) for a, b, d in cosets]
                coeffs = [mpc(1)]
                for r in roots:
                    coeffs = [mpc(0)] + coeffs
                    for k in range(len(coeffs) - 1):
                        coeffs[k] -= r * coeffs[k + 1]
                cols.append(coeffs)  # ascending in X, length deg+1
            terms = {}
            worst = 0.0
            for i in range(deg):  # X^deg coefficient is exactly 1
                vals = [cols[k][i] for k in range(deg + 1)]
                cy = _interpolate_newton([y.real for y in ys], vals)
                dcy = len(cy) - 1
                for k, c in enumerate(cy):
                    ci = int(mp.nint(c.real))
                    worst = max(worst, abs(float(c.real - ci)), abs(float(c.imag)))
                    if ci:
                        terms[(i, dcy - k)] = ci
            terms[(deg, 0)] = 1
        if worst < 0.25:
            P = BivarPoly(terms)
            if P.is_symmetric() and P.bidegree() == (deg, deg):
                mpoly = ModularPoly(n=n, P=P, prec=p)
                if prec is None:
                    _modpoly_cache[n] = mpoly
                return mpoly
    raise PrecisionError(
        f"Phi_{n} failed to stabilize to a symmetric integer polynomial",
        attempted_precisions=attempted,
    )


def coset_j_values(tau, n: int, prec: int = 256) -> list[mpc]:
    """The psi(n) roots of Phi_n(., j(tau)): j((a*tau + b)/d) over the cosets."""
    with mp.workprec(prec + 16):
        t = mpc(tau)
        return [j_eval((a * t + b) / d, prec) for a, b, d in cyclic_cosets(n)]


def kronecker_check(phi: ModularPoly | int) -> bool:
    """Phi_p ≡ (X^p - Y)(X - Y^p) mod p for prime p."""
    mpoly = phi if isinstance(phi, ModularPoly) else modular_poly(phi)
    p = mpoly.n
    if any(e > 1 for e in factorization(p).values()) or len(factorization(p)) != 1:
        raise ValidationError(f"Kronecker congruence applies to primes, got {p}")
    want = {(p + 1, 0): 1, (p, p): -1, (1, 1): -1, (0, p + 1): 1}
    got = {}
    for key, c in mpoly.P.terms.items():
        r = c % p
        if r:
            got[key] = r
    want = {k: c % p for k, c in want.items() if c % p}
    return got == want


def functional_equation_residual(mpoly: ModularPoly, tau, prec: int = 256) -> float:
    """Normalized |Phi_n(j(tau), j(n*tau))| / sum of term magnitudes."""
    with mp.workprec(prec + 16):
        x = j_eval(mpc(tau), prec)
        y = j_eval(mpc(tau) * mpoly.n, prec)
        val, scale = mpoly.P.eval_with_scale(x, y)
        return float(abs(val) / (1 + scale))


def modular_poly_json(mpoly: ModularPoly) -> str:
    return poly_json(mpoly.P, n=mpoly.n, symmetric=mpoly.n > 1)
