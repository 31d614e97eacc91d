import math
import statistics

import pytest
from scipy.integrate import quad

from cmcurves.census import (
    census_csv,
    fundamental_discriminants,
    grh_bound_check,
    li,
    primes_up_to,
    siegel_trend,
    split_count_lower_bound,
    split_prime_count,
)
from cmcurves.errors import ValidationError
from cmcurves.quadorders import is_fundamental_discriminant

from conftest import oracle_is_prime, oracle_kronecker


def quad_li(x):
    val, err = quad(lambda t: 1 / math.log(t), 2, x, limit=200)
    return val


class TestLi:
    def test_empty_integral(self):
        assert li(2) == 0.0

    def test_against_quadrature(self):
        for x in (10, 100, 1e4, 1e6):
            assert abs(li(x) - quad_li(x)) <= 1e-8 * max(1.0, quad_li(x))

    def test_frozen_examples(self):
        assert abs(li(10) - 5.12043572) < 1e-6
        assert abs(li(1e6) - 78626.503996) < 1e-4

    def test_rejects_below_two(self):
        with pytest.raises(ValidationError):
            li(1.5)

    def test_increasing_and_limit(self):
        xs = [10, 100, 1e3, 1e4, 1e6, 1e8]
        vals = [li(x) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        ratios = [li(x) * math.log(x) / x for x in (1e4, 1e6, 1e8)]
        assert all(a > b > 1 for a, b in zip(ratios, ratios[1:]))
        assert abs(ratios[-1] - 1) < 0.07


class TestSplitCounts:
    def test_examples(self):
        assert split_prime_count(-4, 20) == 3  # 5, 13, 17
        assert split_prime_count(-3, 10) == 1  # 7
        assert split_prime_count(-4, 2) == (1 if oracle_kronecker(-4, 2) == 1 else 0)

    def test_monotone(self):
        vals = [split_prime_count(-23, x) for x in (10, 100, 1000, 10000)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_against_trial_division_oracle(self):
        for D in (-4, -3, -20, -23):
            expect = sum(
                1
                for p in range(2, 10 ** 4 + 1)
                if oracle_is_prime(p) and oracle_kronecker(D, p) == 1
            )
            assert split_prime_count(D, 10 ** 4) == expect

    def test_ramified_never_counted(self):
        # all primes dividing D have symbol 0
        assert split_prime_count(-4, 2) == 0
        primes = [int(p) for p in primes_up_to(100)]
        assert 2 not in [p for p in primes if oracle_kronecker(-4, p) == 1]


class TestGrhBound:
    def test_examples(self):
        assert grh_bound_check(-4, 1e4).within_bound
        assert grh_bound_check(-163, 1e5).within_bound
        # single-candidate-prime rows: pi is 0 or 1 and the RHS is positive
        for d_K in (-3, -4):
            row = grh_bound_check(d_K, 2)
            assert row.pi_split in (0, 1)
            assert row.bound_rhs > 0
            assert row.within_bound

    def test_rejects_non_fundamental(self):
        with pytest.raises(ValidationError):
            grh_bound_check(-12, 100)

    def test_window(self):
        for d_K in fundamental_discriminants(100):
            for x in (1e3, 1e4):
                assert grh_bound_check(d_K, x).within_bound, (d_K, x)


class TestLowerBound:
    def test_conductor_term_vanishes_at_f_one(self):
        a = split_count_lower_bound(-4, 1e4)
        # same bound computed with the conductor term dropped
        lx = math.log(1e4)
        manual = 1e4 / (2 * lx) * (
            li(1e4) * lx / 1e4 - lx / (3 * math.sqrt(1e4)) * (math.log(4) + 2 * lx)
        )
        assert abs(a - manual) < 1e-9

    def test_below_actual(self):
        assert split_count_lower_bound(-4, 1e6) <= split_prime_count(-4, 1e6)
        assert split_count_lower_bound(-3, 1e5) <= split_prime_count(-3, 1e5)

    def test_normalized_limit(self):
        vals = [
            split_count_lower_bound(-4, x) / (x / (2 * math.log(x)))
            for x in (1e4, 1e6, 1e8)
        ]
        assert abs(vals[-1] - 1) < 0.06
        assert abs(vals[-1] - 1) < abs(vals[0] - 1)

    def test_conductor_reduces_bound(self):
        assert split_count_lower_bound(-48, 1e4) < split_count_lower_bound(-3, 1e4)


class TestSiegel:
    def test_h_one_gives_zero(self):
        rows = siegel_trend([-4])
        assert rows == [(4, 1, 0.0)]

    def test_sorted_output(self):
        rows = siegel_trend([-999 - k for k in range(0, 200) if (-999 - k) % 4 in (0, 1)])
        assert [r[0] for r in rows] == sorted(r[0] for r in rows)

    def test_median_window(self):
        window = [D for D in fundamental_discriminants(20000) if -D >= 1000]
        rows = siegel_trend(window)
        med = statistics.median(r[2] for r in rows)
        assert 0.7 <= med <= 1.3

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            siegel_trend([])


class TestFundamental:
    def test_cross_check(self):
        listed = set(fundamental_discriminants(500))
        for D in range(-3, -501, -1):
            if D % 4 in (0, 1):
                assert (D in listed) == is_fundamental_discriminant(D), D

    def test_csv_shapes(self):
        rows = [grh_bound_check(d, 1e3) for d in fundamental_discriminants(30)]
        text = census_csv(rows)
        assert text.startswith("d_K,f,D,x,")
        assert len(text.strip().split("\n")) == len(rows) + 1
