"""Exact integer polynomials in one and two variables.

Bivariate polynomials are sparse dicts {(i, j): coeff} on the exponents of
the two variables.  Resultants are computed by specializing the retained
variables at integer nodes, running an integer subresultant PRS on the
shared variable, and interpolating back exactly; this is orders of
magnitude faster than generic symbolic elimination at the sizes used here.

Univariate polynomials are coefficient lists, highest degree first.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import sympy

from .errors import DegenerateResultantError, ValidationError

__all__ = [
    "BivarPoly",
    "resultant_int",
    "resultant_shared_first",
    "interpolate_integer_nodes",
    "poly_json",
    "poly_from_json",
]


# ---------------------------------------------------------------------------
# univariate kernels


def _prem(A: list[int], B: list[int]) -> list[int]:
    """Pseudo-remainder of A by B: lc(B)^(deg A - deg B + 1) * A mod B."""
    dB = len(B) - 1
    lb = B[0]
    R = list(A)
    e = len(R) - 1 - dB + 1
    while len(R) - 1 >= dB and R:
        if R[0] == 0:
            R.pop(0)
            continue
        top = R[0]
        R = [lb * c for c in R]
        for i, c in enumerate(B):
            R[i] -= top * c
        R.pop(0)
        e -= 1
    while R and R[0] == 0:
        R.pop(0)
    if e > 0:
        f = lb ** e
        R = [c * f for c in R]
    return R


def resultant_int(A: list[int], B: list[int]) -> int:
    """Resultant of two integer polynomials via the subresultant PRS."""
    while A and A[0] == 0:
        A = A[1:]
    while B and B[0] == 0:
        B = B[1:]
    if not A or not B:
        return 0
    sign = 1
    if len(A) < len(B):
        if ((len(A) - 1) * (len(B) - 1)) & 1:
            sign = -sign
        A, B = B, A
    if len(B) == 1:
        return sign * B[0] ** (len(A) - 1)
    g = h = 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if dA & dB & 1:
            sign = -sign
        R = _prem(A, B)
        if not R:
            return 0
        denom = g * h ** delta
        A, B = B, [c // denom for c in R]
        g = A[0]
        if delta == 1:
            h = g
        elif delta > 1:
            h = (g ** delta) // (h ** (delta - 1))
        if len(B) == 1:
            dA = len(A) - 1
            res = (B[0] ** dA) // (h ** (dA - 1)) if dA > 1 else B[0] ** dA
            return sign * res


def resultant_sylvester(A: list[int], B: list[int]) -> int:
    """Resultant as the Bareiss determinant of the Sylvester matrix.

    Slower than the PRS route; kept as an independent cross-check.
    """
    while A and A[0] == 0:
        A = A[1:]
    while B and B[0] == 0:
        B = B[1:]
    if not A or not B:
        return 0
    m, n = len(A) - 1, len(B) - 1
    N = m + n
    if N == 0:
        return 1
    M = [[0] * N for _ in range(N)]
    for i in range(n):
        for j, c in enumerate(A):
            M[i][i + j] = c
    for i in range(m):
        for j, c in enumerate(B):
            M[n + i][i + j] = c
    sign, prev = 1, 1
    for k in range(N - 1):
        if M[k][k] == 0:
            for r in range(k + 1, N):
                if M[r][k]:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = M[k][k]
        for i in range(k + 1, N):
            row, rk = M[i], M[i][k]
            top = M[k]
            for j in range(k + 1, N):
                row[j] = (row[j] * pk - rk * top[j]) // prev
            row[k] = 0
        prev = pk
    return sign * M[N - 1][N - 1]


def eval_univar(coeffs: list, x):
    """Horner evaluation; coefficient list highest-first."""
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def interpolate_integer_nodes(values: list[Fraction | int], nodes: list[int]) -> list[Fraction]:
    """Coefficients (highest-first) of the poly through (nodes[k], values[k]).

    Newton divided differences over exact rationals.
    """
    n = len(nodes)
    dd = [Fraction(v) for v in values]
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level])
    # expand Newton form: sum dd[k] * prod_{i<k} (x - nodes[i])
    coeffs = [dd[n - 1]]
    for k in range(n - 2, -1, -1):
        # multiply by (x - nodes[k]) and add dd[k]; descending avoids aliasing
        coeffs = coeffs + [Fraction(0)]
        for i in range(len(coeffs) - 2, -1, -1):
            coeffs[i + 1] -= coeffs[i] * nodes[k]
        coeffs[-1] += dd[k]
    return coeffs


# ---------------------------------------------------------------------------
# bivariate polynomials


class BivarPoly:
    """Sparse exact-integer polynomial in two variables."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for (i, j), c in (terms.items() if isinstance(terms, dict) else terms):
                c = int(c)
                if c:
                    key = (int(i), int(j))
                    t[key] = t.get(key, 0) + c
                    if not t[key]:
                        del t[key]
        self.terms = t

    # -- constructors ------------------------------------------------------

    @staticmethod
    def variable(which: int) -> "BivarPoly":
        return BivarPoly({(1, 0) if which == 1 else (0, 1): 1})

    @staticmethod
    def constant(c: int) -> "BivarPoly":
        return BivarPoly({(0, 0): c})

    @staticmethod
    def from_univar(coeffs: list[int], var: int) -> "BivarPoly":
        """Embed a univariate poly (highest-first) as a poly in variable `var`."""
        d = len(coeffs) - 1
        if var == 1:
            return BivarPoly({(d - k, 0): c for k, c in enumerate(coeffs)})
        return BivarPoly({(0, d - k): c for k, c in enumerate(coeffs)})

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def deg1(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def deg2(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def bidegree(self) -> tuple[int, int]:
        return (self.deg1(), self.deg2())

    def content(self) -> int:
        return math.gcd(*self.terms.values()) if self.terms else 0

    def primitive_part(self) -> "BivarPoly":
        c = self.content()
        if c in (0, 1):
            return self
        return BivarPoly({k: v // c for k, v in self.terms.items()})

    def swap(self) -> "BivarPoly":
        return BivarPoly({(j, i): c for (i, j), c in self.terms.items()})

    def is_symmetric(self) -> bool:
        return all(self.terms.get((j, i)) == c for (i, j), c in self.terms.items())

    # -- arithmetic ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, BivarPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return BivarPoly({k: -c for k, c in self.terms.items()})

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
            if not t[k]:
                del t[k]
        out = BivarPoly.__new__(BivarPoly)
        out.terms = t
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return BivarPoly({k: c * other for k, c in self.terms.items()})
        t = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                t[k] = t.get(k, 0) + c1 * c2
        return BivarPoly(t)

    __rmul__ = __mul__

    # -- evaluation ---------------------------------------------------------

    def coeffs_in_first(self) -> list[list[int]]:
        """Coefficients as polys in var2: entry k is the (highest-first)
        univariate coefficient list of the var2-poly multiplying var1^(d1-k)."""
        d1, d2 = self.deg1(), self.deg2()
        rows = [[0] * (d2 + 1) for _ in range(d1 + 1)]
        for (i, j), c in self.terms.items():
            rows[d1 - i][d2 - j] = c
        return rows

    def eval_second(self, y) -> list:
        """Substitute var2 = y; returns univariate coefficients in var1 (highest-first)."""
        return [eval_univar(row, y) for row in self.coeffs_in_first()]

    def eval_first(self, x) -> list:
        return self.swap().eval_second(x)

    def __call__(self, x, y):
        return eval_univar(self.eval_second(y), x)

    def eval_with_scale(self, x, y):
        """(value, sum of term magnitudes) at numeric (x, y)."""
        val = self(x, y)
        scale = sum(abs(c) * abs(x) ** i * abs(y) ** j for (i, j), c in self.terms.items())
        return val, scale

    def __repr__(self):
        if not self.terms:
            return "BivarPoly(0)"
        parts = [f"{c}*x{i}y{j}" for (i, j), c in sorted(self.terms.items())]
        s = " + ".join(parts[:6])
        return f"BivarPoly({s}{' + ...' if len(parts) > 6 else ''})"

    # -- sympy bridge --------------------------------------------------------

    def to_sympy(self, g1=None, g2=None):
        x1 = g1 if g1 is not None else sympy.Symbol("x1")
        x2 = g2 if g2 is not None else sympy.Symbol("x2")
        return sympy.Poly.from_dict(self.terms, x1, x2, domain=sympy.ZZ)

    @staticmethod
    def from_sympy(expr, g1, g2) -> "BivarPoly":
        p = sympy.Poly(expr, g1, g2)
        return BivarPoly({(int(i), int(j)): int(c) for (i, j), c in p.terms()})


# ---------------------------------------------------------------------------
# resultants of bivariate polynomials


def _specialize_nodes(P: BivarPoly, count: int):
    """Integer nodes for var2 of P at which the leading var1-coefficient of P
    does not vanish, so specialization commutes with the resultant."""
    d1 = P.deg1()
    lead = [P.terms.get((d1, j), 0) for j in range(P.deg2(), -1, -1)]
    nodes = []
    v = 0
    while len(nodes) < count:
        if eval_univar(lead, v) != 0:
            nodes.append(v)
        v += 1
    return nodes


def resultant_shared_first(P: BivarPoly, Q: BivarPoly) -> BivarPoly:
    """Res_t(P(t, a), Q(t, b)) as a BivarPoly in (a, b).

    Both inputs are dicts on (t, own-second-variable).  Evaluation at integer
    node grids + integer PRS + exact Newton interpolation.
    """
    if P.is_zero() or Q.is_zero():
        raise DegenerateResultantError("resultant of a zero polynomial")
    dP, dQ = P.deg1(), Q.deg1()
    da, db = P.deg2(), Q.deg2()
    na = da * dQ  # deg bound of result in a
    nb = db * dP
    if dP == 0 or dQ == 0:
        # no shared variable left: Res = P^dQ * Q^dP with scalars in a or b
        raise DegenerateResultantError("shared variable absent from one argument")
    a_nodes = _specialize_nodes(P, na + 1)
    b_nodes = _specialize_nodes(Q, nb + 1)
    Q_spec = {s: Q.eval_second(s) for s in b_nodes}
    # grid of integer resultants
    rows = []
    for r in a_nodes:
        Pr = P.eval_second(r)
        row = [resultant_int(Pr, Q_spec[s]) for s in b_nodes]
        # interpolate along b
        rows.append(interpolate_integer_nodes(row, b_nodes))
    # rows[r] = coeffs (highest-first, length nb+1) of R(a_r, b)
    terms = {}
    for jb in range(nb + 1):
        col = [rows[k][jb] if jb < len(rows[k]) else Fraction(0) for k in range(len(a_nodes))]
        ca = interpolate_integer_nodes(col, a_nodes)
        dd = len(ca) - 1
        for k, c in enumerate(ca):
            if c:
                if c.denominator != 1:
                    raise ArithmeticError("non-integral interpolated resultant coefficient")
                terms[(dd - k, nb - jb)] = int(c)
    return BivarPoly(terms)


def divides(F: BivarPoly, G: BivarPoly) -> bool:
    """Exact divisibility F | G over the rationals."""
    if G.is_zero():
        return True
    if F.is_zero():
        return False
    x1, x2 = sympy.symbols("_dv1 _dv2")
    pf = F.to_sympy(x1, x2).set_domain(sympy.QQ)
    pg = G.to_sympy(x1, x2).set_domain(sympy.QQ)
    _, r = pg.div(pf)
    return r.is_zero


def is_irreducible_over_q(F: BivarPoly) -> bool:
    """Irreducibility of a primitive bivariate integer poly over Q.

    Fast path: no univariate content in either variable plus an irreducible
    full-degree specialization certifies irreducibility; otherwise fall back
    to a full bivariate factorization.
    """
    if F.is_zero():
        return False
    if len(F.terms) == 1:
        (i, j), _ = next(iter(F.terms.items()))
        return i + j == 1
    x1, x2 = sympy.symbols("_ir1 _ir2")
    d1m = F.deg1()
    # content w.r.t. each variable must be trivial
    for swapped in (False, True):
        P = (F.swap() if swapped else F).coeffs_in_first()
        rows = [sympy.Poly(r, x2) for r in P]
        g = rows[0]
        for r in rows[1:]:
            g = g.gcd(r)
            if g.degree() == 0:
                break
        if g.degree() > 0:
            return False
    for t0 in (0, 1, -1, 2, -2, 3, 5, 7):
        spec = F.eval_second(t0)
        if spec[0] == 0:  # degree dropped; pick another node
            continue
        p = sympy.Poly(spec, x1)
        if p.degree() != d1m:
            continue
        _, factors = p.factor_list()
        if len(factors) == 1 and factors[0][1] == 1:
            return True
    _, factors = sympy.factor_list(F.to_sympy(x1, x2).as_expr(), x1, x2)
    return len(factors) == 1 and factors[0][1] == 1


# ---------------------------------------------------------------------------
# JSON schema: {"terms": [[i, j, "coeff"]], optional "n", "symmetric"}


def poly_json(P: BivarPoly, n: int | None = None, symmetric: bool | None = None) -> str:
    sym = P.is_symmetric() if symmetric is None else symmetric
    items = []
    for (i, j), c in sorted(P.terms.items()):
        if sym and i < j:
            continue
        items.append([i, j, str(c)])
    obj: dict = {}
    if n is not None:
        obj["n"] = n
    obj["symmetric"] = sym
    obj["terms"] = items
    return json.dumps(obj)


def poly_from_json(text: str | dict) -> BivarPoly:
    try:
        obj = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid polynomial JSON: {exc}") from exc
    if not isinstance(obj, dict) or "terms" not in obj:
        raise ValidationError("polynomial JSON must be an object with a 'terms' list")
    terms = {}
    try:
        for entry in obj["terms"]:
            i, j, c = entry
            terms[(int(i), int(j))] = int(str(c))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed polynomial term: {exc}") from exc
    if obj.get("symmetric"):
        for (i, j), c in list(terms.items()):
            if i != j:
                if (j, i) in terms and terms[(j, i)] != c:
                    raise ValidationError("symmetry flag contradicts explicit terms")
                terms[(j, i)] = c
    return BivarPoly(terms)
