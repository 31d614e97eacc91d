"""High-precision singular moduli: j-values, Hilbert class polynomials, and
the class-group action on their roots.

j is evaluated from q-expansions after reducing the argument into the
standard fundamental domain (so |q| <= exp(-pi*sqrt(3))): the numerator is
the Eisenstein series E4^3 and the denominator is eta^24 = q*prod(1-q^n)^24
via the pentagonal-number series, which avoids the catastrophic
cancellation of the (E4^3 - E6^2)/1728 form.  Relative accuracy is
2^(-p + g) at working precision p with guard slack g = 16 bits.

The roots of the degree-h(D) Hilbert class polynomial H_D are the j-values
of the reduced forms of discriminant D, and the class group permutes them:
the class of Q sends the root indexed by R to the one indexed by
compose(inverse(Q), R).  The principal class fixes every root and the
action is free and transitive (one orbit of length h).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp, mpc, mpf

from .errors import PrecisionError, ValidationError
from .quadorders import (
    OrderDisc,
    QuadForm,
    compose,
    inverse,
    order_of_discriminant,
    reduced_forms,
)

__all__ = [
    "UpperHalfPoint",
    "CMJInvariant",
    "HilbertClassPoly",
    "DEFAULT_PRECISION",
    "PRECISION_CEILING",
    "J_GUARD_BITS",
    "tau_of_form",
    "j_eval",
    "inverse_j",
    "hilbert_class_poly",
    "hilbert_precision_estimate",
    "cm_j_invariants",
    "torsor_act",
    "hilbert_json",
    "hilbert_from_json",
]

DEFAULT_PRECISION = 256
PRECISION_CEILING = 1 << 20
J_GUARD_BITS = 16

_LOG2_OVER_PI_SQRT3 = math.log(2) / (math.pi * math.sqrt(3))


@dataclass(frozen=True)
class UpperHalfPoint:
    """Point re + im*i in the upper half plane, carried at `prec` bits."""

    re: mpf
    im: mpf
    prec: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not self.im > 0:
            raise ValidationError(f"im = {self.im} must be positive")
        if self.prec < 64:
            raise ValidationError(f"precision {self.prec} below the 64-bit floor")

    def to_mpc(self) -> mpc:
        return mpc(self.re, self.im)


def tau_of_form(Q: QuadForm, prec: int = DEFAULT_PRECISION) -> UpperHalfPoint:
    """tau = (-b + i*sqrt(|D|)) / (2a); in the fundamental domain when Q is reduced."""
    with mp.workprec(prec + 8):
        im = mp.sqrt(-Q.discriminant()) / (2 * Q.a)
        re = mpf(-Q.b) / (2 * Q.a)
    return UpperHalfPoint(re=re, im=im, prec=prec)


@lru_cache(maxsize=8)
def _sigma3(limit: int) -> tuple[int, ...]:
    s = [0] * (limit + 1)
    for d in range(1, limit + 1):
        d3 = d * d * d
        for m in range(d, limit + 1, d):
            s[m] += d3
    return tuple(s)


@lru_cache(maxsize=8)
def _sigma5(limit: int) -> tuple[int, ...]:
    s = [0] * (limit + 1)
    for d in range(1, limit + 1):
        d5 = d ** 5
        for m in range(d, limit + 1, d):
            s[m] += d5
    return tuple(s)


def _pentagonal_terms(limit: int) -> list[tuple[int, int]]:
    """(exponent, sign) of prod(1-q^n) truncated past q^limit, descending."""
    out = [(0, 1)]
    k = 1
    while k * (3 * k - 1) // 2 <= limit:
        s = -1 if k & 1 else 1
        out.append((k * (3 * k - 1) // 2, s))
        if k * (3 * k + 1) // 2 <= limit:
            out.append((k * (3 * k + 1) // 2, s))
        k += 1
    out.sort(reverse=True)
    return out


def _series_length(prec: int) -> int:
    n = int((prec + 48) * _LOG2_OVER_PI_SQRT3) + 8
    while 3 * math.log2(n) + 9 - n / _LOG2_OVER_PI_SQRT3 > -(prec + 24):
        n += 8
    return n


def _reduce_fundamental(t: mpc, wp: int) -> mpc:
    """SL2(Z)-reduce into |Re| <= 1/2, |tau| >= 1."""
    for _ in range(10 * wp + 100):
        r = mp.nint(t.real)
        if r:
            t = t - r
        if mp.fabs(t) < 1 - mpf(2) ** (-wp // 2):
            t = -1 / t
        else:
            return t
    raise PrecisionError("fundamental-domain reduction did not converge")


def j_eval(tau, prec: int | None = None) -> mpc:
    """Klein j-invariant of the lattice Z + Z*tau.

    Accepts an UpperHalfPoint or any complex-like with positive imaginary
    part.  Result carries relative error below 2^(-prec + 16).
    """
    if isinstance(tau, UpperHalfPoint):
        prec = prec or tau.prec
    else:
        prec = prec or DEFAULT_PRECISION
    if prec > PRECISION_CEILING:
        raise PrecisionError(
            f"requested precision {prec} exceeds ceiling {PRECISION_CEILING}",
            attempted_precisions=[prec],
        )
    wp = prec + J_GUARD_BITS + 8
    with mp.workprec(wp):
        # mpc() rounds its arguments to the ambient precision, so the
        # conversion must happen inside the working-precision block
        t = mpc(tau.re, tau.im) if isinstance(tau, UpperHalfPoint) else mpc(tau)
        if not t.imag > 0:
            raise ValidationError("j is only evaluated on the upper half plane")
        t = _reduce_fundamental(t, wp)
        q = mp.exp(2j * mp.pi * t)
        e4, _, delta = _eisenstein(q, prec, need_e6=False)
        return +(e4 ** 3 / delta)


def _eisenstein(q, prec: int, need_e6: bool = True):
    """(E4, E6, Delta) at the nome q, |q| <= ~exp(-pi*sqrt(3)), current workprec.

    Delta comes from eta^24 = q*(pentagonal series)^24, never from
    (E4^3 - E6^2)/1728, so no cancellation occurs for tiny q.
    """
    n_terms = _series_length(prec)
    lim = 256 * (n_terms // 256 + 1)  # stable cache key
    s3 = _sigma3(lim)
    e4 = mpc(0)
    for n in range(n_terms, 0, -1):
        e4 = (e4 + 240 * s3[n]) * q
    e4 += 1
    e6 = None
    if need_e6:
        s5 = _sigma5(lim)
        e6 = mpc(0)
        for n in range(n_terms, 0, -1):
            e6 = (e6 - 504 * s5[n]) * q
        e6 += 1
    acc = mpc(0)
    prev_e = None
    for e, s in _pentagonal_terms(n_terms):
        acc = mpc(s) if prev_e is None else acc * q ** (prev_e - e) + s
        prev_e = e
    delta = q * acc ** 24
    return e4, e6, delta


def inverse_j(y, prec: int = DEFAULT_PRECISION) -> mpc:
    """A point tau in the upper half plane with j(tau) = y.

    Newton iteration on the nome q, using q*dj/dq = -j*E6/E4, started from
    the small root of 196884*q^2 + (744-y)*q + 1 = 0.  Efficient and
    reliable away from the critical values 0 and 1728 of j; raises
    PrecisionError when the iteration stalls (callers treat such arguments
    as degenerate and resample).
    """
    wp = prec + 48
    with mp.workprec(wp):
        yv = mpc(y)
        c = yv - 744
        root = mp.sqrt(c * c - 4 * 196884)
        den = c + root if abs(c + root) > abs(c - root) else c - root
        q = 2 / den if den != 0 else mpc("0.004")
        if not abs(q) > 0 or not mp.isfinite(q):
            q = mpc("0.004")
        target = mpf(2) ** (-prec) * (abs(yv) + 1800)
        for _ in range(80):
            e4, e6, delta = _eisenstein(q, prec)
            j = e4 ** 3 / delta
            err = j - yv
            if abs(err) < target:
                tau = mp.log(q) / (2j * mp.pi)
                return mpc(tau.real, abs(tau.imag))
            qjp = -j * e6 / e4  # q * dj/dq
            if qjp == 0:
                break
            step = err * q / qjp
            # keep the iterate inside the disk where the series is reliable
            if not mp.isfinite(step):
                break
            q = q - step
            if not (0 < abs(q) < mpf("0.03")):
                break
        raise PrecisionError(f"inverse_j stalled for y = {mp.nstr(yv, 8)}")


@dataclass(frozen=True)
class HilbertClassPoly:
    """Monic integer polynomial with root set {j(tau_Q)}, degree h(D).

    `coeffs` is low-to-high and ends with 1.
    """

    D: OrderDisc
    coeffs: tuple[int, ...]
    prec: int

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_with_scale(self, x):
        val = self(x)
        ax = abs(x)
        scale = sum(abs(c) * ax ** k for k, c in enumerate(self.coeffs))
        return val, scale


def hilbert_precision_estimate(D: int) -> int:
    """32 + ceil((pi*sqrt(|D|)/ln 2) * sum over reduced forms of 1/a)."""
    inv_a = sum(1.0 / Q.a for Q in reduced_forms(D))
    return 32 + math.ceil(math.pi * math.sqrt(-D) / math.log(2) * inv_a)


_hilbert_cache: dict[int, HilbertClassPoly] = {}


def hilbert_class_poly(D: int | OrderDisc, prec: int | None = None, retries: int = 4) -> HilbertClassPoly:
    """H_D by rounding prod_Q (X - j(tau_Q)) over the reduced forms.

    Starts at the coefficient-height estimate (or the precision given),
    doubles on rounding-residual failure, and raises PrecisionError with the
    attempted precisions after `retries` doublings.  Every coefficient must
    round with absolute residual < 0.25.
    """
    od = D if isinstance(D, OrderDisc) else order_of_discriminant(D)
    if prec is None and od.D in _hilbert_cache:
        return _hilbert_cache[od.D]
    forms = reduced_forms(od.D)
    base = prec if prec is not None else hilbert_precision_estimate(od.D)
    base = max(base, 64)
    attempted = []
    for attempt in range(retries + 1):
        p = base << attempt
        attempted.append(p)
        if p > PRECISION_CEILING:
            break
        js = [j_eval(tau_of_form(Q, p), p) for Q in forms]
        with mp.workprec(p + 16):
            coeffs = [mpc(1)]
            for jv in js:
                coeffs = [mpc(0)] + coeffs
                for k in range(len(coeffs) - 1):
                    coeffs[k] -= jv * coeffs[k + 1]
            rounded = []
            ok = True
            for c in coeffs:
                ci = int(mp.nint(c.real))
                if abs(c.real - ci) >= 0.25 or abs(c.imag) >= 0.25:
                    ok = False
                    break
                rounded.append(ci)
        if ok:
            H = HilbertClassPoly(D=od, coeffs=tuple(rounded), prec=p)
            if prec is None:
                _hilbert_cache[od.D] = H
            return H
    raise PrecisionError(
        f"H_{od.D} failed to round to integers", attempted_precisions=attempted
    )


@dataclass(frozen=True)
class CMJInvariant:
    """A root of H_D tagged by the reduced form that indexes it."""

    D: OrderDisc
    form: QuadForm
    approx: mpc
    prec: int


def cm_j_invariants(D: int | OrderDisc, prec: int = DEFAULT_PRECISION) -> list[CMJInvariant]:
    od = D if isinstance(D, OrderDisc) else order_of_discriminant(D)
    return [
        CMJInvariant(D=od, form=Q, approx=j_eval(tau_of_form(Q, prec), prec), prec=prec)
        for Q in reduced_forms(od.D)
    ]


def torsor_act(Q: QuadForm, x: CMJInvariant, prec: int | None = None) -> CMJInvariant:
    """Action of the class of Q on the root set of H_D.

    The new root is indexed by compose(inverse(Q), form(x)): tensoring with
    the module class of Q corresponds to ideal multiplication, which is
    inversion under the form dictionary.  The principal class acts as the
    identity; the action is free and transitive on the h(D) roots.
    """
    if Q.discriminant() != x.D.D:
        raise ValidationError(
            f"discriminant mismatch: form has {Q.discriminant()}, point has {x.D.D}"
        )
    prec = prec or x.prec
    new_form = compose(inverse(Q), x.form)
    return CMJInvariant(
        D=x.D,
        form=new_form,
        approx=j_eval(tau_of_form(new_form, prec), prec),
        prec=prec,
    )


def hilbert_json(H: HilbertClassPoly) -> str:
    return json.dumps({"D": H.D.D, "coeffs": [str(c) for c in H.coeffs]})


def hilbert_from_json(text: str) -> tuple[int, list[int]]:
    try:
        obj = json.loads(text)
        return int(obj["D"]), [int(c) for c in obj["coeffs"]]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ValidationError(f"invalid Hilbert polynomial JSON: {exc}") from exc
