import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cmcurves.errors import ValidationError
from cmcurves.polys import (
    BivarPoly,
    divides,
    interpolate_integer_nodes,
    is_irreducible_over_q,
    poly_from_json,
    poly_json,
    resultant_int,
    resultant_shared_first,
    resultant_sylvester,
)

coeff = st.integers(min_value=-10 ** 6, max_value=10 ** 6)


class TestUnivariateResultant:
    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(coeff, min_size=1, max_size=9),
        st.lists(coeff, min_size=1, max_size=9),
    )
    def test_prs_matches_sylvester(self, a, b):
        assert resultant_int(a, b) == resultant_sylvester(a, b)

    def test_edge_cases(self):
        assert resultant_int([], [1, 2]) == 0
        assert resultant_int([3], [5]) == 1
        assert resultant_int([1, 0], [1, 0]) == 0  # common root x = 0
        assert resultant_int([2, -6], [1, -3]) == 0  # common root 3
        # Res(x^2+1, x+1) = 2
        assert resultant_int([1, 0, 1], [1, 1]) == 2

    def test_big_coefficients(self):
        rng = random.Random(5)
        for _ in range(10):
            a = [rng.randrange(-10 ** 40, 10 ** 40) for _ in range(rng.randint(2, 10))]
            b = [rng.randrange(-10 ** 40, 10 ** 40) for _ in range(rng.randint(2, 10))]
            assert resultant_int(a, b) == resultant_sylvester(a, b)

    def test_product_rule(self):
        # Res(f, g*h) = Res(f, g) * Res(f, h)
        rng = random.Random(6)
        for _ in range(20):
            f = [rng.randint(-50, 50) for _ in range(4)]
            g = [rng.randint(-50, 50) for _ in range(3)]
            h = [rng.randint(-50, 50) for _ in range(3)]
            if f[0] == 0 or g[0] == 0 or h[0] == 0:
                continue
            gh = [0] * (len(g) + len(h) - 1)
            for i, ci in enumerate(g):
                for j, cj in enumerate(h):
                    gh[i + j] += ci * cj
            assert resultant_int(f, gh) == resultant_int(f, g) * resultant_int(f, h)


class TestInterpolation:
    @settings(max_examples=60, deadline=None)
    @given(st.lists(coeff, min_size=1, max_size=8))
    def test_roundtrip(self, coeffs):
        nodes = list(range(len(coeffs)))
        vals = []
        for x in nodes:
            acc = 0
            for c in coeffs:
                acc = acc * x + c
            vals.append(acc)
        got = interpolate_integer_nodes(vals, nodes)
        # strip leading zeros of the expected
        want = list(coeffs)
        while want and want[0] == 0 and len(want) > 1:
            want.pop(0)
        got_ints = [int(c) for c in got]
        while got_ints and got_ints[0] == 0 and len(got_ints) > 1:
            got_ints.pop(0)
        assert got_ints == want
        assert all(c.denominator == 1 for c in got)


class TestBivarPoly:
    def test_arithmetic_and_eval(self):
        x = BivarPoly.variable(1)
        y = BivarPoly.variable(2)
        p = x * x * y + 3 * y - BivarPoly.constant(7)
        assert p(2, 5) == 4 * 5 + 15 - 7
        assert p.bidegree() == (2, 1)
        assert (p - p).is_zero()

    def test_content_and_primitive(self):
        p = BivarPoly({(1, 0): 6, (0, 1): -9})
        assert p.content() == 3
        assert p.primitive_part() == BivarPoly({(1, 0): 2, (0, 1): -3})

    def test_swap_symmetry(self):
        p = BivarPoly({(2, 0): 1, (0, 2): 1, (1, 1): -3})
        assert p.is_symmetric()
        q = BivarPoly({(2, 1): 5})
        assert q.swap() == BivarPoly({(1, 2): 5})

    def test_sympy_bridge(self):
        gx, gy = sympy.symbols("gx gy")
        p = BivarPoly({(2, 1): 3, (0, 0): -1})
        back = BivarPoly.from_sympy(p.to_sympy(gx, gy).as_expr(), gx, gy)
        assert back == p

    def test_json_roundtrip(self):
        p = BivarPoly({(3, 0): 1, (0, 3): 1, (1, 1): -2})
        assert poly_from_json(poly_json(p)) == p
        # symmetric compression keeps only i >= j terms
        assert '"symmetric": true' in poly_json(p)
        assert poly_from_json(poly_json(p, symmetric=True)) == p

    def test_json_rejects_garbage(self):
        with pytest.raises(ValidationError):
            poly_from_json("{nope")
        with pytest.raises(ValidationError):
            poly_from_json('{"no_terms": []}')
        with pytest.raises(ValidationError):
            poly_from_json('{"terms": [[0, "x", "1"]]}')


class TestSharedResultant:
    def test_matches_sympy(self):
        rng = random.Random(11)
        u, v, x, y = sympy.symbols("u v x y")
        for _ in range(6):
            P = BivarPoly(
                {(i, j): rng.randint(-9, 9) for i in range(3) for j in range(3)}
            )
            Q = BivarPoly(
                {(i, j): rng.randint(-9, 9) for i in range(3) for j in range(3)}
            )
            if P.deg1() < 1 or Q.deg1() < 1:
                continue
            mine = resultant_shared_first(P, Q)
            pe = sum(c * u ** i * v ** j for (i, j), c in P.terms.items())
            qe = sum(c * u ** i * y ** j for (i, j), c in Q.terms.items())
            ref = sympy.resultant(pe, qe, u)
            refp = BivarPoly.from_sympy(sympy.expand(ref), v, y)
            assert mine == refp

    def test_divides(self):
        x = BivarPoly.variable(1)
        y = BivarPoly.variable(2)
        f = x - y
        g = (x - y) * (x * y + BivarPoly.constant(3))
        assert divides(f, g)
        assert not divides(x + y, g)


class TestIrreducibility:
    def test_known_cases(self):
        x = BivarPoly.variable(1)
        y = BivarPoly.variable(2)
        assert is_irreducible_over_q(x - y)
        assert is_irreducible_over_q(x * x * y + BivarPoly.constant(1))
        assert not is_irreducible_over_q((x - y) * (x + y))
        assert not is_irreducible_over_q((x + y) * (x + y))
        # univariate content factor
        assert not is_irreducible_over_q((y + BivarPoly.constant(2)) * (x - y))

    def test_modular_polys_irreducible(self):
        from cmcurves.modpoly import modular_poly

        for n in (2, 3, 5):
            assert is_irreducible_over_q(modular_poly(n).P)
