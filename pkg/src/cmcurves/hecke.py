"""Plane curves in C^2, Hecke images, containment tests, and the modularity
certifier.

The correspondence T_n sends a j-invariant to the j-invariants of the
quotients by the cyclic order-n subgroups; (T_n x T_n)C is cut out by

    G(x, y) = Res_v( Res_u( F(u, v), Phi_n(u, x) ), Phi_n(v, y) ),

with bidegree (psi(n)^2*d2, psi(n)^2*d1) generically.  Containment
C ⊂ (T_n x T_n)C is decided either by exact divisibility F | G over Q or by
numeric root pairing: at a sample point (x0, y0) on C the membership
condition is that some root u of Phi_n(., x0) and some root v of
Phi_n(., y0) satisfy F(u, v) = 0.  Success at more samples than the
intersection number 2*d1*d2*psi(n)^2 allows for a proper intersection is
decisive, up to floating-point trust.

The certifier accepts only square-free n > 1 composed of primes
p >= max{5, d1}; a curve with non-constant projections contained in its own
(T_n x T_n) image for such n is the image of a cyclic-isogeny curve, and the
level m is identified by exact comparison against Phi_m.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp, mpc, mpf, polyroots

from .errors import CeilingError, DegenerateResultantError, PrecisionError, ValidationError
from .moduli import inverse_j
from .modpoly import DEFAULT_N_CEILING, coset_j_values, modular_poly, psi
from .polys import BivarPoly, divides, is_irreducible_over_q, poly_from_json, poly_json, resultant_shared_first
from .quadorders import factorization

__all__ = [
    "PlaneCurve",
    "HeckeImage",
    "ContainmentCertificate",
    "ModularityReport",
    "bidegree",
    "intersection_number",
    "hecke_image",
    "contains_in_hecke_image",
    "certificate_inequality",
    "identify_modular_level",
    "certify_modular",
    "qualifying_levels",
]

DEFAULT_TOLERANCE_BITS = 32
DEFAULT_SAMPLE_PREC = 320
_FAIL_FACTOR = 1 << 10  # margins above tol*factor are decisive failures


class PlaneCurve:
    """Primitive integer curve F(x1, x2) = 0 with projection degrees (d1, d2).

    d1 = deg in x2 = degree of the first projection; d2 = deg in x1.
    """

    def __init__(self, F: BivarPoly, check_irreducible: bool = False):
        if F.is_zero():
            raise ValidationError("zero polynomial does not define a curve")
        self.F = F.primitive_part()
        self.d1 = self.F.deg2()
        self.d2 = self.F.deg1()
        self._irreducible: bool | None = None
        if check_irreducible:
            self.irreducible_over_q()

    def irreducible_over_q(self) -> bool:
        if self._irreducible is None:
            self._irreducible = is_irreducible_over_q(self.F)
        return self._irreducible

    def curve_id(self) -> str:
        canon = json.dumps(sorted((i, j, str(c)) for (i, j), c in self.F.terms.items()))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    @staticmethod
    def from_json(text: str | dict) -> "PlaneCurve":
        return PlaneCurve(poly_from_json(text))

    def to_json(self) -> str:
        return poly_json(self.F)

    def __repr__(self):
        return f"PlaneCurve(id={self.curve_id()}, bidegree=({self.d1}, {self.d2}))"


def bidegree(F: BivarPoly | PlaneCurve) -> tuple[int, int]:
    """(deg in second variable, deg in first variable)."""
    if isinstance(F, PlaneCurve):
        return (F.d1, F.d2)
    if F.is_zero():
        raise ValidationError("bidegree of the zero polynomial")
    return (F.deg2(), F.deg1())


def intersection_number(bideg1: tuple[int, int], bideg2: tuple[int, int]) -> int:
    """(a,b)·(c,d) = a*d + b*c on the divisor classes of P^1 x P^1."""
    (a, b), (c, d) = bideg1, bideg2
    if min(a, b, c, d) < 0:
        raise ValidationError("intersection form needs non-negative bidegrees")
    return a * d + b * c


@dataclass(frozen=True)
class HeckeImage:
    source: PlaneCurve
    n: int
    G: BivarPoly
    shear: int = 0

    def bidegree(self) -> tuple[int, int]:
        return (self.G.deg2(), self.G.deg1())


def hecke_image(C: PlaneCurve, n: int, ceiling: int = DEFAULT_N_CEILING) -> HeckeImage:
    """G cutting out (T_n x T_n)C, by the double resultant, content removed."""
    if C.d1 <= 0 or C.d2 <= 0:
        raise ValidationError("hecke_image needs both projections non-constant")
    phi = modular_poly(n, ceiling=ceiling).P
    r1 = resultant_shared_first(C.F, phi)  # (v, x) <- eliminate u
    if r1.is_zero():
        raise DegenerateResultantError(
            "first elimination vanished identically; shear the curve (x1 -> x1 + k*x2)"
        )
    g = resultant_shared_first(r1, phi)  # (x, y) <- eliminate v
    if g.is_zero():
        raise DegenerateResultantError(
            "second elimination vanished identically; shear the curve (x1 -> x1 + k*x2)"
        )
    return HeckeImage(source=C, n=n, G=g.primitive_part())


@dataclass
class ContainmentCertificate:
    curve_id: str
    n: int
    method: str
    verdict: str  # contained | not-contained | inconclusive
    samples: int = 0
    tolerance: float = 0.0
    max_success_margin: float = 0.0
    failure_margin: float | None = None
    shear: int = 0
    detail: str = ""

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def certificate_inequality(d1: int, d2: int, p: int, h: int) -> bool:
    """2*d1*d2*(p+1)^2 < h."""
    if min(d1, d2, p, h) <= 0:
        raise ValidationError("certificate inequality needs positive arguments")
    return 2 * d1 * d2 * (p + 1) ** 2 < h


def _distinct_roots(coeffs, prec: int):
    """polyroots with convergence escalation; None if roots collide."""
    for extra in (prec // 2, 2 * prec):
        try:
            with mp.workprec(prec + extra):
                roots, err = polyroots(coeffs, maxsteps=600, extraprec=extra, error=True)
        except Exception:
            continue
        sep = min(
            (abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]),
            default=mpf(1),
        )
        if sep > mpf(2) ** (-prec // 4) * max(1, max(abs(r) for r in roots)):
            return roots
    return None


def _curve_branches(C: PlaneCurve, x0m, prec: int):
    """Roots of F(x0, .), seeded by a float64 eigen-solve and Newton-polished
    at full precision; falls back to mpmath polyroots.  None on degeneracy."""
    coeffs = C.F.eval_first(x0m)  # highest-first in x2, exact-to-mpf values
    lead = coeffs[0]
    floats = [float(c / lead) for c in coeffs]
    seeds = None
    if all(math.isfinite(f) for f in floats):
        try:
            rts = np.roots(floats)
            if np.all(np.isfinite(rts)):
                seeds = [mpc(complex(r)) for r in rts]
        except Exception:
            seeds = None
    if seeds is not None:
        deriv = [c * (len(coeffs) - 1 - k) for k, c in enumerate(coeffs[:-1])]
        roots = []
        ok = True
        for r in seeds:
            for _ in range(1 + prec.bit_length()):
                fv = _horner(coeffs, r)
                dv = _horner(deriv, r)
                if dv == 0:
                    ok = False
                    break
                step = fv / dv
                r = r - step
                if abs(step) <= abs(r) * mpf(2) ** (-prec + 8):
                    break
            else:
                ok = False
            if not ok:
                break
            roots.append(r)
        if ok:
            sep = min(
                (abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]),
                default=mpf(1),
            )
            if sep > mpf(2) ** (-prec // 4) * max(1, max(abs(r) for r in roots)):
                return roots
    return _distinct_roots(coeffs, prec)


def _horner(coeffs, x):
    acc = mpc(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _isogenous_roots(w, n: int, prec: int):
    """Roots of Phi_n(., w) through the coset j-values of a j-preimage of w;
    mpmath polyroots as fallback when the inversion stalls."""
    try:
        tau = inverse_j(w, prec)
        return coset_j_values(tau, n, prec)
    except PrecisionError:
        phi = modular_poly(n).P
        with mp.workprec(prec + 16):
            return _distinct_roots(phi.eval_second(mpc(w)), prec)


def _pair_margin(F: BivarPoly, us, vs, tol: float):
    """Smallest normalized |F(u, v)| over the root pairs; early exit below tol."""
    best = float("inf")
    d1, d2 = F.deg1(), F.deg2()
    items = list(F.terms.items())
    for u in us:
        au = abs(u)
        upows = [mpf(1)]
        for _ in range(d1):
            upows.append(upows[-1] * au)
        for v in vs:
            av = abs(v)
            vpows = [mpf(1)]
            for _ in range(d2):
                vpows.append(vpows[-1] * av)
            val = F(u, v)
            scale = mpf(0)
            for (i, j), c in items:
                scale += abs(c) * upows[i] * vpows[j]
            resid = float(abs(val) / (1 + scale))
            if resid < best:
                best = resid
                if best < tol:
                    return best
    return best


def contains_in_hecke_image(
    C: PlaneCurve,
    n: int,
    method: str = "numeric-root-pairing",
    samples: int | None = None,
    tolerance_bits: int = DEFAULT_TOLERANCE_BITS,
    seed: int = 0,
    prec: int = DEFAULT_SAMPLE_PREC,
    ceiling: int = DEFAULT_N_CEILING,
) -> ContainmentCertificate:
    """Decide C ⊂ (T_n x T_n)C.

    exact-divisibility: F | G over Q, rigorous.  numeric-root-pairing: all of
    N > 2*d1*d2*psi(n)^2 sample points must admit a root pairing with
    normalized residual below 2^-tolerance_bits; a sample whose best margin
    exceeds 2^10 times the tolerance refutes containment, anything between
    is inconclusive.
    """
    if C.d1 <= 0 or C.d2 <= 0:
        raise ValidationError("containment needs both projections non-constant")
    if method in ("exact", "exact-divisibility"):
        img = hecke_image(C, n, ceiling=ceiling)
        ok = divides(C.F, img.G)
        return ContainmentCertificate(
            curve_id=C.curve_id(),
            n=n,
            method="exact-divisibility",
            verdict="contained" if ok else "not-contained",
            samples=0,
            tolerance=0.0,
            detail=f"G bidegree {img.G.bidegree()}",
        )
    if method not in ("numeric", "numeric-root-pairing"):
        raise ValidationError(f"unknown containment method {method!r}")

    deg = psi(n)
    modular_poly(n, ceiling=ceiling)  # enforce the ceiling up front
    tol = 2.0 ** (-tolerance_bits)
    needed = samples if samples is not None else 2 * C.d1 * C.d2 * deg * deg + 1
    rng = random.Random(seed)
    lead_row = [C.F.terms.get((i, C.d1), 0) for i in range(C.d2, -1, -1)]  # lc in x2

    done = 0
    max_success = 0.0
    draws = 0
    used: set[Fraction] = set()
    while done < needed:
        draws += 1
        if draws > 40 * needed + 200:
            return ContainmentCertificate(
                curve_id=C.curve_id(), n=n, method="numeric-root-pairing",
                verdict="inconclusive", samples=done, tolerance=tol,
                max_success_margin=max_success,
                detail="sample generation kept hitting degenerate abscissae",
            )
        den = rng.randint(1, 8)
        x0 = Fraction(rng.randint(1800 * den, 16000 * den), den)
        if x0 in used:
            continue
        used.add(x0)
        # leading coefficient of F in x2 must not vanish at x0
        acc = 0
        for c in lead_row:
            acc = acc * x0 + c
        if acc == 0:
            continue
        with mp.workprec(prec + 16):
            x0m = mpf(x0.numerator) / x0.denominator
            ys = _curve_branches(C, x0m, prec)
            if ys is None:
                continue
            us = _isogenous_roots(x0m, n, prec)
            if us is None:
                continue
            for y0 in ys:
                vs = _isogenous_roots(y0, n, prec)
                if vs is None:
                    continue
                margin = _pair_margin(C.F, us, vs, tol)
                if margin < tol:
                    done += 1
                    max_success = max(max_success, margin)
                    if done >= needed:
                        break
                elif margin > tol * _FAIL_FACTOR:
                    return ContainmentCertificate(
                        curve_id=C.curve_id(), n=n, method="numeric-root-pairing",
                        verdict="not-contained", samples=done, tolerance=tol,
                        max_success_margin=max_success, failure_margin=margin,
                        detail=f"failed at sample x0={x0}, margin/tol={margin / tol:.3e}",
                    )
                else:
                    return ContainmentCertificate(
                        curve_id=C.curve_id(), n=n, method="numeric-root-pairing",
                        verdict="inconclusive", samples=done, tolerance=tol,
                        max_success_margin=max_success, failure_margin=margin,
                        detail=f"margin {margin:.3e} within the gray zone at x0={x0}",
                    )
    return ContainmentCertificate(
        curve_id=C.curve_id(), n=n, method="numeric-root-pairing",
        verdict="contained", samples=done, tolerance=tol,
        max_success_margin=max_success,
        detail=f"all {done} samples paired (threshold {needed})",
    )


def qualifying_levels(d1: int, nmax: int) -> list[int]:
    """Square-free n in (1, nmax] whose prime factors are all >= max(5, d1)."""
    floor = max(5, d1)
    out = []
    for n in range(2, nmax + 1):
        fac = factorization(n)
        if all(e == 1 for e in fac.values()) and all(p >= floor for p in fac):
            out.append(n)
    return out


def identify_modular_level(C: PlaneCurve, ceiling: int = DEFAULT_N_CEILING) -> int | None:
    """The unique m with psi(m) = d1 = d2 and F = ±Phi_m, if any."""
    if C.d1 != C.d2:
        return None
    for m in range(1, C.d1 + 1):
        if psi(m) != C.d1:
            continue
        if m > ceiling:
            continue
        try:
            phi = modular_poly(m, ceiling=ceiling).P
        except CeilingError:
            continue
        if C.F == phi or C.F == -phi:
            return m
    return None


@dataclass
class ModularityReport:
    curve_id: str
    bidegree: tuple[int, int]
    verdict: str  # certified | not-certified | inconclusive | level-unmatched
    n: int | None = None
    m: int | None = None
    tried: list[ContainmentCertificate] = field(default_factory=list)
    detail: str = ""

    def to_json(self) -> str:
        obj = dict(self.__dict__)
        obj["tried"] = [json.loads(c.to_json()) for c in self.tried]
        obj["bidegree"] = list(self.bidegree)
        return json.dumps(obj, sort_keys=True)


def certify_modular(
    C: PlaneCurve,
    nmax: int = DEFAULT_N_CEILING,
    samples: int | None = None,
    tolerance_bits: int = DEFAULT_TOLERANCE_BITS,
    seed: int = 0,
    prec: int = DEFAULT_SAMPLE_PREC,
) -> ModularityReport:
    """Search qualifying levels n for containment; identify the level on success.

    A "contained" verdict with no matching Phi_m is reported as
    level-unmatched, which signals an implementation or ceiling problem
    rather than a mathematical possibility.
    """
    if C.d1 <= 0 or C.d2 <= 0:
        raise ValidationError("certification requires non-constant projections")
    if not C.irreducible_over_q():
        raise ValidationError("certification requires an irreducible curve")
    report = ModularityReport(
        curve_id=C.curve_id(), bidegree=(C.d1, C.d2), verdict="not-certified"
    )
    levels = qualifying_levels(C.d1, nmax)
    if not levels:
        report.detail = f"no qualifying square-free n within ceiling {nmax}"
        return report
    saw_inconclusive = False
    for n in levels:
        cert = contains_in_hecke_image(
            C, n, samples=samples, tolerance_bits=tolerance_bits, seed=seed, prec=prec
        )
        report.tried.append(cert)
        if cert.verdict == "contained":
            m = identify_modular_level(C, ceiling=max(nmax, DEFAULT_N_CEILING))
            if m is None:
                report.verdict = "level-unmatched"
                report.n = n
                report.detail = (
                    "containment holds but no Phi_m matched: implementation or "
                    "ceiling problem"
                )
                return report
            report.verdict = "certified"
            report.n = n
            report.m = m
            report.detail = f"contained in its T_{n} x T_{n} image; matches level {m}"
            return report
        if cert.verdict == "inconclusive":
            saw_inconclusive = True
    if saw_inconclusive:
        report.verdict = "inconclusive"
        report.detail = "no containment found; at least one level was inconclusive"
    else:
        report.detail = f"containment refuted for n in {levels}"
    return report
