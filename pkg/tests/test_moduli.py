import math
import random

import pytest
from mpmath import mp, mpc, mpf

from cmcurves.errors import PrecisionError, ValidationError
from cmcurves.moduli import (
    PRECISION_CEILING,
    UpperHalfPoint,
    cm_j_invariants,
    hilbert_class_poly,
    hilbert_from_json,
    hilbert_json,
    hilbert_precision_estimate,
    inverse_j,
    j_eval,
    tau_of_form,
    torsor_act,
)
from cmcurves.quadorders import (
    QuadForm,
    class_number,
    compose,
    principal_form,
    reduce_form,
    reduced_forms,
)

from conftest import oracle_j


def norm_resid(H, x, prec=None):
    with mp.workprec(prec or max(H.prec, 300)):
        val, scale = H.eval_with_scale(x)
        return float(abs(val) / (1 + scale))


class TestTau:
    def test_examples(self):
        t = tau_of_form(QuadForm(1, 0, 1))
        assert abs(t.re) == 0 and abs(t.im - 1) < 1e-70
        t = tau_of_form(QuadForm(1, 1, 1))
        assert abs(t.re + 0.5) < 1e-70 and abs(t.im - math.sqrt(3) / 2) < 1e-15
        t = tau_of_form(QuadForm(2, 1, 3))  # D = -23
        assert abs(t.re + 0.25) < 1e-70 and abs(t.im - math.sqrt(23) / 4) < 1e-15

    def test_rejects_lower_half(self):
        with pytest.raises(ValidationError):
            UpperHalfPoint(re=mpf(0), im=mpf(-1))


class TestJ:
    def test_derived_values_match_oracle(self):
        # frozen via the independent 55-term E4/E6 oracle
        assert abs(j_eval(mpc(0, 1), 220) - 1728) < 1e-50
        assert abs(oracle_j(mpc(0, 1)) - 1728) < 1e-50
        rho = mpc(-0.5, math.sqrt(3) / 2)
        assert abs(j_eval(rho, 220)) < 1e-40
        assert abs(oracle_j(rho)) < 1e-40
        assert abs(j_eval(mpc(0, 2), 220) - 287496) < 1e-45
        assert abs(oracle_j(mpc(0, 2)) - 287496) < 1e-45
        assert 287496 == 66 ** 3

    def test_agrees_with_oracle_at_random_points(self):
        rng = random.Random(3)
        for _ in range(20):
            tau = mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.6))
            mine = j_eval(tau, 200)
            ref = oracle_j(tau)
            assert abs(mine - ref) <= 1e-40 * (1 + abs(ref))

    def test_modular_invariance(self):
        rng = random.Random(4)
        prec = 256
        with mp.workprec(prec + 16):
            for _ in range(100):
                tau = mpc(rng.uniform(-0.7, 0.7), rng.uniform(0.8, 1.8))
                j0 = j_eval(tau, prec)
                j1 = j_eval(tau + 1, prec)
                j2 = j_eval(-1 / tau, prec)
                tol = mpf(2) ** (-prec + 24) * (1 + abs(j0))
                assert abs(j0 - j1) < tol
                assert abs(j0 - j2) < tol

    def test_precision_ceiling(self):
        with pytest.raises(PrecisionError):
            j_eval(mpc(0, 1), PRECISION_CEILING + 64)

    def test_inverse_j_roundtrip(self):
        rng = random.Random(5)
        for _ in range(10):
            tau = mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.4))
            y = j_eval(tau, 256)
            t2 = inverse_j(y, 256)
            assert abs(j_eval(t2, 256) - y) < mpf(2) ** (-200) * (1 + abs(y))


class TestHilbert:
    def test_frozen_small_polys(self):
        assert hilbert_class_poly(-3).coeffs == (0, 1)
        assert hilbert_class_poly(-4).coeffs == (-1728, 1)
        assert hilbert_class_poly(-15).coeffs == (-121287375, 191025, 1)

    def test_quadratic_roots_satisfy(self):
        H = hilbert_class_poly(-15)
        for pt in cm_j_invariants(-15, 300):
            assert norm_resid(H, pt.approx) < 2.0 ** -150

    def test_degree_and_integrality_window(self):
        for D in range(-3, -301, -1):
            if D % 4 not in (0, 1):
                continue
            H = hilbert_class_poly(D)
            assert H.degree() == class_number(D)
            assert H.coeffs[-1] == 1
            for pt in cm_j_invariants(D, H.prec):
                assert norm_resid(H, pt.approx, H.prec + 16) < 2.0 ** (-(H.prec // 2))

    def test_precision_estimate_positive(self):
        assert hilbert_precision_estimate(-4) > 32
        assert hilbert_precision_estimate(-1999) > 800

    def test_json_roundtrip(self):
        H = hilbert_class_poly(-23)
        D, coeffs = hilbert_from_json(hilbert_json(H))
        assert D == -23 and tuple(coeffs) == H.coeffs

    def test_json_rejects(self):
        with pytest.raises(ValidationError):
            hilbert_from_json('{"coeffs": ["1"]}')


class TestTorsor:
    def test_identity(self):
        for D in (-23, -84):
            e = reduce_form(*principal_form(D).triple())
            for x in cm_j_invariants(D, 256):
                y = torsor_act(e, x)
                assert y.form == x.form
                assert abs(y.approx - x.approx) < mpf(2) ** -200 * (1 + abs(x.approx))

    def test_three_cycle(self):
        pts = cm_j_invariants(-23, 256)
        Q = QuadForm(2, 1, 3)
        start = pts[0]
        orbit = [start.form]
        cur = start
        for _ in range(3):
            cur = torsor_act(Q, cur)
            orbit.append(cur.form)
        assert orbit[3] == orbit[0]
        assert len({f.triple() for f in orbit[:3]}) == 3

    def test_free_on_minus_84(self):
        pts = cm_j_invariants(-84, 256)
        e = reduce_form(*principal_form(-84).triple())
        for Q in reduced_forms(-84):
            if Q == e:
                continue
            for x in pts:
                assert torsor_act(Q, x).form != x.form

    def test_transitive_and_compatible(self):
        for D in (-23, -56, -84, -71):
            pts = cm_j_invariants(D, 256)
            forms = reduced_forms(D)
            # transitivity from the first root
            reached = {torsor_act(Q, pts[0]).form.triple() for Q in forms}
            assert reached == {f.triple() for f in forms}
            # act(Q, act(R, x)) == act(compose(Q, R), x)
            rng = random.Random(D)
            for _ in range(5):
                Q, R = rng.choice(forms), rng.choice(forms)
                x = rng.choice(pts)
                lhs = torsor_act(Q, torsor_act(R, x))
                rhs = torsor_act(compose(Q, R), x)
                assert lhs.form == rhs.form

    def test_mismatch_rejected(self):
        pts = cm_j_invariants(-23, 256)
        with pytest.raises(ValidationError):
            torsor_act(QuadForm(1, 0, 1), pts[0])

    def test_action_permutes_numeric_roots(self):
        for D in (-23, -84):
            pts = cm_j_invariants(D, 256)
            vals = [p.approx for p in pts]
            for Q in reduced_forms(D):
                moved = [torsor_act(Q, x).approx for x in pts]
                # multiset equality within tolerance
                used = set()
                for m in moved:
                    hit = None
                    for k, v in enumerate(vals):
                        if k not in used and abs(m - v) < mpf(2) ** -100 * (1 + abs(v)):
                            hit = k
                            break
                    assert hit is not None
                    used.add(hit)
