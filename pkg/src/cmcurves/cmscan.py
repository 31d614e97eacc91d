"""CM points on plane curves: detection, field comparison, conductor ratios,
and split-prime certificates.

A CM point of the curve F = 0 is a common solution of F(x, y) = 0,
H_D1(x) = 0, H_D2(y) = 0.  Candidates are found by pairing the known roots
{j(tau_Q)} of the two class polynomials numerically; every reported record
is then backed by exact evidence: the gcd over Q of H_D1(x) and
Res_y(F(x, y), H_D2(y)) must be non-constant, and the high-precision
residuals of all three defining polynomials are attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy
from mpmath import mp, mpf

from .errors import CeilingError, ValidationError
from .hecke import PlaneCurve
from .moduli import cm_j_invariants, hilbert_class_poly
from .polys import interpolate_integer_nodes, resultant_int
from .quadorders import (
    OrderDisc,
    class_number,
    kronecker,
    order_of_discriminant,
)

__all__ = [
    "CMPointRecord",
    "SplitPrimeCertificate",
    "DEFAULT_DMAX_CEILING",
    "cm_points_on_curve",
    "cm_field_report",
    "conductor_ratio_census",
    "split_prime_for_certificate",
    "records_csv",
]

DEFAULT_DMAX_CEILING = 1000
_CANDIDATE_CUTOFF = 1e-6  # loose float prefilter; exact gcd confirms


@dataclass(frozen=True)
class CMPointRecord:
    """One CM point (x, y) on the curve, with exactness evidence."""

    D1: OrderDisc
    D2: OrderDisc
    x_approx: complex
    y_approx: complex
    same_field: bool
    resid_curve: float
    resid_x: float
    resid_y: float
    gcd_degree: int

    @property
    def f1(self) -> int:
        return self.D1.f

    @property
    def f2(self) -> int:
        return self.D2.f


@dataclass(frozen=True)
class SplitPrimeCertificate:
    D: OrderDisc
    p: int
    h: int
    d1: int
    d2: int
    lhs: int  # 2*d1*d2*(p+1)^2

    @property
    def satisfied(self) -> bool:
        return self.lhs < self.h


def _valid_discriminants(dmax: int) -> list[int]:
    # Python's % is non-negative: D ≡ 0, 1 (mod 4)
    return [D for D in range(-3, -dmax - 1, -1) if D % 4 in (0, 1)]


def _resultant_vs_hilbert(C: PlaneCurve, coeffs_desc: list[int]) -> list[int]:
    """Res_y(F(x, y), H(y)) as integer coefficients in x, highest-first.

    Evaluation at integer nodes + integer PRS, interpolated exactly; H is
    monic so specialization never drops its degree.
    """
    dx = C.d2 * (len(coeffs_desc) - 1)
    rows = C.F.swap().coeffs_in_first()  # F as poly in y with x-coefficients
    lead = rows[0]
    nodes = []
    v = 0
    while len(nodes) < dx + 1:
        acc = 0
        for c in lead:
            acc = acc * v + c
        if acc != 0:
            nodes.append(v)
        v += 1
    vals = []
    for r in nodes:
        spec = []
        for row in rows:
            acc = 0
            for c in row:
                acc = acc * r + c
            spec.append(acc)
        vals.append(resultant_int(spec, coeffs_desc))
    out = interpolate_integer_nodes(vals, nodes)
    assert all(c.denominator == 1 for c in out)
    return [int(c) for c in out]


def _gcd_degree(h1_desc: list[int], r_desc: list[int]) -> int:
    x = sympy.Symbol("_scan_x")
    g = sympy.gcd(sympy.Poly(h1_desc, x), sympy.Poly(r_desc, x))
    return sympy.Poly(g, x).degree()


def cm_points_on_curve(
    C: PlaneCurve,
    dmax: int,
    prec: int = 256,
    ceiling: int = DEFAULT_DMAX_CEILING,
) -> list[CMPointRecord]:
    """All CM points on C with both discriminants at most dmax in absolute value.

    Results are sorted by (|D1|, |D2|, root indices) and duplicate-free; each
    record carries the non-constant-gcd degree plus normalized residuals of
    F, H_D1, H_D2 at the reported coordinates.
    """
    if C.d1 <= 0 or C.d2 <= 0:
        raise ValidationError("cm scan needs both projections non-constant")
    if dmax > ceiling:
        raise CeilingError(f"dmax = {dmax} exceeds the scan ceiling {ceiling}")
    discs = _valid_discriminants(dmax)
    roots: dict[int, list] = {}
    for D in discs:
        roots[D] = cm_j_invariants(D, prec)
    froots = {
        D: [complex(pt.approx) for pt in pts] for D, pts in roots.items()
    }
    # float prefilter over all root pairs
    fterms = list(C.F.terms.items())
    candidates: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for D1 in discs:
        for k1, x0 in enumerate(froots[D1]):
            ax = abs(x0)
            for D2 in discs:
                for k2, y0 in enumerate(froots[D2]):
                    try:
                        val = 0.0
                        scale = 1.0
                        for (i, j), c in fterms:
                            t = c * x0 ** i * y0 ** j
                            val += t
                            scale += abs(t)
                        ok = abs(val) / scale < _CANDIDATE_CUTOFF
                    except OverflowError:
                        ok = True  # decide at full precision below
                    if ok:
                        candidates.setdefault((D1, D2), []).append((k1, k2))
    # exact confirmation per discriminant pair
    res_cache: dict[int, list[int]] = {}
    out = []
    tol = mpf(2) ** (-(prec // 2))
    for (D1, D2), pairs in sorted(candidates.items(), key=lambda kv: (-kv[0][0], -kv[0][1])):
        H1 = hilbert_class_poly(D1)
        H2 = hilbert_class_poly(D2)
        if D2 not in res_cache:
            res_cache[D2] = _resultant_vs_hilbert(C, list(reversed(H2.coeffs)))
        gdeg = _gcd_degree(list(reversed(H1.coeffs)), res_cache[D2])
        if gdeg == 0:
            continue
        for k1, k2 in sorted(pairs):
            p1 = roots[D1][k1]
            p2 = roots[D2][k2]
            with mp.workprec(prec + 16):
                fval, fscale = C.F.eval_with_scale(p1.approx, p2.approx)
                rf = float(abs(fval) / (1 + fscale))
                v1, s1 = H1.eval_with_scale(p1.approx)
                v2, s2 = H2.eval_with_scale(p2.approx)
                r1 = float(abs(v1) / (1 + s1))
                r2 = float(abs(v2) / (1 + s2))
            if not (rf < tol and r1 < tol and r2 < tol):
                continue
            out.append(
                CMPointRecord(
                    D1=p1.D,
                    D2=p2.D,
                    x_approx=complex(p1.approx),
                    y_approx=complex(p2.approx),
                    same_field=p1.D.d_K == p2.D.d_K,
                    resid_curve=rf,
                    resid_x=r1,
                    resid_y=r2,
                    gcd_degree=gdeg,
                )
            )
    out.sort(key=lambda r: (-r.D1.D, -r.D2.D, r.x_approx.real, r.y_approx.real))
    return out


@dataclass(frozen=True)
class CMFieldSummary:
    total: int
    matched: int
    mismatched: int
    by_fields: dict[tuple[int, int], int]
    mismatch_bounds: tuple[dict, ...] = ()

    def mismatch_records(self):
        return {k: v for k, v in self.by_fields.items() if k[0] != k[1]}


def cm_field_report(
    records: list[CMPointRecord], bidegree: tuple[int, int] | None = None
) -> CMFieldSummary:
    """Partition records by the pair of fundamental discriminants.

    With the curve's bidegree (d1, d2) given, every mismatched-field record
    also gets the comparison column 2*d_i*2^(omega_odd(D_i)+10) vs h(D_i):
    a mismatch forces the class number under that bound, which is why only
    finitely many mismatches can occur as the discriminants grow.
    """
    from .quadorders import omega_odd

    by: dict[tuple[int, int], int] = {}
    matched = 0
    bounds = []
    for r in records:
        key = (r.D1.d_K, r.D2.d_K)
        by[key] = by.get(key, 0) + 1
        if r.same_field:
            matched += 1
        elif bidegree is not None:
            d1, d2 = bidegree
            row = {"D1": r.D1.D, "D2": r.D2.D}
            for tag, od, d in (("1", r.D1, d1), ("2", r.D2, d2)):
                row[f"h{tag}"] = class_number(od.D)
                row[f"bound{tag}"] = 2 * d * (1 << (omega_odd(od.D) + 10))
            bounds.append(row)
    return CMFieldSummary(
        total=len(records),
        matched=matched,
        mismatched=len(records) - matched,
        by_fields=by,
        mismatch_bounds=tuple(bounds),
    )


def conductor_ratio_census(records: list[CMPointRecord]) -> dict[Fraction, int]:
    """Multiset of conductor ratios f1/f2 over the same-field records."""
    out: dict[Fraction, int] = {}
    for r in records:
        if not r.same_field:
            continue
        q = Fraction(r.D1.f, r.D2.f)
        out[q] = out.get(q, 0) + 1
    return dict(sorted(out.items()))


def split_prime_for_certificate(
    D: int | OrderDisc, d1: int, d2: int
) -> SplitPrimeCertificate | None:
    """Smallest split prime p with 2*d1*d2*(p+1)^2 < h(D), if one exists.

    The inequality forces p < sqrt(h/(2*d1*d2)) - 1, so the search space is
    finite and tiny.
    """
    od = D if isinstance(D, OrderDisc) else order_of_discriminant(D)
    if d1 <= 0 or d2 <= 0:
        raise ValidationError("projection degrees must be positive")
    h = class_number(od.D)
    pmax = math.isqrt(h // (2 * d1 * d2)) if h >= 2 * d1 * d2 else 0
    p = 2
    while p <= pmax:
        if kronecker(od.D, p) == 1 and certificate_lhs(d1, d2, p) < h:
            return SplitPrimeCertificate(
                D=od, p=p, h=h, d1=d1, d2=d2, lhs=certificate_lhs(d1, d2, p)
            )
        p = _next_prime(p)
    return None


def certificate_lhs(d1: int, d2: int, p: int) -> int:
    return 2 * d1 * d2 * (p + 1) ** 2


def _next_prime(p: int) -> int:
    q = p + 1
    while any(q % r == 0 for r in range(2, math.isqrt(q) + 1)):
        q += 1
    return q


def records_csv(records: list[CMPointRecord]) -> str:
    """CSV with header: D1,f1,D2,f2,x,y,same_field,residuals,gcd_degree."""
    lines = ["D1,f1,D2,f2,x_re,x_im,y_re,y_im,same_field,resid_curve,resid_x,resid_y,gcd_degree"]
    for r in records:
        lines.append(
            f"{r.D1.D},{r.f1},{r.D2.D},{r.f2},"
            f"{r.x_approx.real:.12e},{r.x_approx.imag:.12e},"
            f"{r.y_approx.real:.12e},{r.y_approx.imag:.12e},"
            f"{int(r.same_field)},{r.resid_curve:.3e},{r.resid_x:.3e},{r.resid_y:.3e},"
            f"{r.gcd_degree}"
        )
    return "\n".join(lines) + "\n"
