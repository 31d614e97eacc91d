"""Split-prime censuses, the logarithmic integral, explicit Chebotarev-type
bounds, and the class-number growth trend.

pi_split(D, x) counts primes p <= x with Kronecker symbol (D/p) = 1, i.e.
the primes at which the order of discriminant D splits as F_p x F_p.  The
census compares the count against Li(x)/2 with the explicit error term
(1/6)*sqrt(x)*(log d_K + 2 log x) valid for maximal orders under GRH, and
against the derived lower bound for non-maximal orders, whose conductor
term enters through log2(f).  Bounds are reported, never asserted: a
violation would be news, not an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from mpmath import mp

from .errors import CeilingError, ValidationError
from .quadorders import (
    OrderDisc,
    class_number,
    class_number_table,
    is_fundamental_discriminant,
    kronecker,
    order_of_discriminant,
)

__all__ = [
    "CensusRow",
    "SIEVE_CEILING",
    "primes_up_to",
    "li",
    "split_prime_count",
    "grh_bound_check",
    "split_count_lower_bound",
    "siegel_trend",
    "fundamental_discriminants",
    "census_csv",
    "siegel_csv",
]

SIEVE_CEILING = 10 ** 8

_prime_cache: dict[str, np.ndarray] = {}


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n, by a cached numpy sieve."""
    if n > SIEVE_CEILING:
        raise CeilingError(f"sieve limit {n} exceeds ceiling {SIEVE_CEILING}")
    cached = _prime_cache.get("primes")
    if cached is not None and _prime_cache["limit"] >= n:
        return cached[: np.searchsorted(cached, n, side="right")]
    limit = max(n, 1 << 16)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    primes = np.nonzero(sieve)[0]
    _prime_cache["primes"] = primes
    _prime_cache["limit"] = limit
    return primes[: np.searchsorted(primes, n, side="right")]


def li(x: float) -> float:
    """Li(x) = integral from 2 to x of dt/log(t); relative error < 1e-10."""
    if x < 2:
        raise ValidationError(f"Li is defined for x >= 2, got {x}")
    with mp.workprec(80):
        return float(mp.li(x, offset=True))


def split_prime_count(D: int | OrderDisc, x: float) -> int:
    """#{p <= x prime : (D/p) = 1}; ramified primes (p | D) never count."""
    od = D if isinstance(D, OrderDisc) else order_of_discriminant(D)
    if x < 2:
        raise ValidationError(f"split_prime_count needs x >= 2, got {x}")
    count = 0
    for p in primes_up_to(int(x)):
        if kronecker(od.D, int(p)) == 1:
            count += 1
    return count


@dataclass(frozen=True)
class CensusRow:
    D: OrderDisc
    x: float
    pi_split: int
    li_half: float
    bound_rhs: float
    within_bound: bool


def grh_bound_check(d_K: int, x: float) -> CensusRow:
    """|pi_split(x) - Li(x)/2| vs (1/6)*sqrt(x)*(log d_K + 2 log x), f = 1.

    d_K enters the bound through its absolute value.
    """
    if not is_fundamental_discriminant(d_K):
        raise ValidationError(f"{d_K} is not a fundamental discriminant")
    od = OrderDisc(d_K=d_K, f=1, D=d_K)
    pi = split_prime_count(od, x)
    half = li(x) / 2
    rhs = math.sqrt(x) * (math.log(-d_K) + 2 * math.log(x)) / 6
    return CensusRow(
        D=od,
        x=float(x),
        pi_split=pi,
        li_half=half,
        bound_rhs=rhs,
        within_bound=abs(pi - half) <= rhs,
    )


def split_count_lower_bound(D: int | OrderDisc, x: float) -> float:
    """Explicit lower bound for pi_split of a (possibly non-maximal) order:

        (x/(2 log x)) * ( Li(x)*log(x)/x
                          - (log(x)/(3*sqrt(x)))*(log d_K + 2 log x)
                          - 2*log(x)*log(f)/(x*log 2) ).

    The conductor enters through log2(f), the number of primes dividing f
    being at most that.
    """
    od = D if isinstance(D, OrderDisc) else order_of_discriminant(D)
    if x < 2:
        raise ValidationError(f"lower bound needs x >= 2, got {x}")
    lx = math.log(x)
    dk = -od.d_K
    main = li(x) * lx / x
    cheb = lx / (3 * math.sqrt(x)) * (math.log(dk) + 2 * lx)
    cond = 2 * lx * math.log(od.f) / (x * math.log(2))
    return x / (2 * lx) * (main - cheb - cond)


def siegel_trend(D_list: list[int]) -> list[tuple[int, int, float]]:
    """Rows (|D|, h(D), log h / log sqrt|D|), sorted by |D| ascending.

    The ratio tends to 1 as |D| grows; no assertion is made here, callers
    inspect medians over windows.  Bulk inputs use the one-sweep class
    number table.
    """
    if not D_list:
        raise ValidationError("siegel_trend needs a non-empty list")
    ds = sorted({-abs(int(D)) for D in D_list}, reverse=True)
    for D in ds:
        order_of_discriminant(D)  # validates
    if len(ds) > 128:
        table = class_number_table(-min(ds))
        hs = {D: table[D] for D in ds}
    else:
        hs = {D: class_number(D) for D in ds}
    out = []
    for D in ds:
        h = hs[D]
        ratio = math.log(h) / math.log(math.sqrt(-D)) if h > 1 else 0.0
        out.append((-D, h, ratio))
    return out


@lru_cache(maxsize=4)
def fundamental_discriminants(limit: int) -> tuple[int, ...]:
    """All fundamental discriminants D with |D| <= limit, |D| ascending."""
    sf = np.ones(limit + 1, dtype=bool)
    for k in range(2, math.isqrt(limit) + 1):
        sf[k * k :: k * k] = False
    out = []
    for n in range(3, limit + 1):
        if n % 4 == 3 and sf[n]:
            out.append(-n)
        elif n % 4 == 0:
            k = n // 4
            if k % 4 in (1, 2) and sf[k]:
                out.append(-n)
    return tuple(sorted(out, reverse=True))


def census_csv(rows: list[CensusRow]) -> str:
    lines = ["d_K,f,D,x,pi_split,li_half,bound_rhs,within_bound"]
    for r in rows:
        lines.append(
            f"{r.D.d_K},{r.D.f},{r.D.D},{r.x:.6e},{r.pi_split},"
            f"{r.li_half:.12e},{r.bound_rhs:.12e},{int(r.within_bound)}"
        )
    return "\n".join(lines) + "\n"


def siegel_csv(rows: list[tuple[int, int, float]]) -> str:
    lines = ["abs_D,h,log_ratio"]
    for absd, h, ratio in rows:
        lines.append(f"{absd},{h},{ratio:.12e}")
    return "\n".join(lines) + "\n"
