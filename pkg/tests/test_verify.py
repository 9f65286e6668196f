import json
from fractions import Fraction

import pytest

from meanval.arith import ArithParams
from meanval.errors import ConfigError
from meanval.verify import (
    dirichlet_series_truncated,
    euler_product_truncated,
    global_factorization_check,
    power_series_check,
    power_series_closed_form,
    local_factor,
    local_factor_check,
    local_factor_excess,
    numerator_identity_check,
    render_table,
    run_battery,
)

from oracles import expand_numerators, weighted_geometric_sum


class TestSeriesIdentity:
    def test_r1_z_half_equals_three(self):
        # at r = 1 the coefficients are a+1, whose weighted geometric sum at
        # z = 1/2 is 1/(1-z)^2 - 1 = 3
        assert power_series_closed_form(1, 0.5) == pytest.approx(3.0, abs=1e-12)
        assert weighted_geometric_sum(0.5) == 3.0
        rep = power_series_check(1, 0.5, terms=100)
        assert rep.passed and abs(rep.lhs - 3.0) < 1e-12

    def test_r1_matches_geometric_derivative_everywhere(self):
        for z in (0.05, 0.2, 0.45, 0.8):
            assert power_series_closed_form(1, z) == pytest.approx(
                weighted_geometric_sum(z), rel=1e-13
            )

    def test_r2_z_half(self):
        rep = power_series_check(2, 0.5)
        assert rep.rhs == pytest.approx(0.875 / 0.375, rel=1e-15)
        assert rep.passed

    def test_z_zero_both_sides_vanish(self):
        rep = power_series_check(3, 0.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.passed

    def test_grid(self):
        for r in (1, 2, 3, 5):
            for z in (0.1, 0.3, 0.5, 0.9):
                rep = power_series_check(r, z)
                assert rep.passed, (r, z, rep.gap, rep.bound)

    def test_bound_tracks_the_actual_tail(self):
        # truncating at 3 terms leaves a visible tail at z = 0.9; the rigorous
        # bound must cover it without being orders of magnitude loose
        rep = power_series_check(2, 0.9, terms=3)
        assert rep.gap > 1.0
        assert rep.passed
        assert rep.gap <= rep.bound <= 3.0 * rep.gap

    def test_domain(self):
        with pytest.raises(ConfigError):
            power_series_closed_form(2, 1.0)
        with pytest.raises(ConfigError):
            power_series_check(0, 0.5)


class TestLocalFactor:
    def test_worked_example(self):
        got = local_factor(2, 2.0, ArithParams(2, 1.0))
        expected = 1.0 + (0.25 * (2 - 0.0625)) / (0.75 * 0.9375)
        assert got == pytest.approx(expected, rel=1e-15)
        assert got == pytest.approx(1.6888888888888889, rel=1e-12)

    def test_series_agreement(self):
        for p in (2, 3, 101):
            for s in (1.5, 2.0):
                for params in (ArithParams(2, 1.0), ArithParams(3, 2.5)):
                    rep = local_factor_check(p, s, params)
                    assert rep.passed, (p, s, params, rep.gap, rep.bound)

    def test_large_weight_limit(self):
        assert local_factor(2, 2.0, ArithParams(2, 1e9)) == pytest.approx(1.0, abs=1e-8)

    def test_large_prime_expansion(self):
        # excess ~ 2/(k p^s); checked without forming 1 + excess, so the
        # comparison survives at magnitudes far below one ulp of 1.0
        p = 10**6 + 3
        excess = local_factor_excess(p, 2.0, ArithParams(2, 1.0))
        assert abs(excess - 2.0 * p**-2.0) < 10.0 * p**-3.0


class TestNumeratorIdentity:
    def test_exact_match_at_weight_one(self):
        for r in range(2, 11):
            rep = numerator_identity_check(ArithParams(r, 1.0))
            assert rep.passed
            assert all(c == "0" for c in rep.details["coefficient_diff"])

    def test_weight_two_gap(self):
        rep = numerator_identity_check(ArithParams(2, 2.0))
        assert not rep.passed
        diff = [Fraction(c) for c in rep.details["coefficient_diff"]]
        assert diff[1] == -2  # degree-1 coefficient: (2 - k) - k at k = 2

    def test_gap_structure_any_weight(self):
        # difference is (2-2k) z + (1-k) z^r + (k-1) z^(r+1)
        for r in (2, 3, 5):
            for k in (2, 3, 7):
                rep = numerator_identity_check(ArithParams(r, float(k)))
                diff = [Fraction(c) for c in rep.details["coefficient_diff"]]
                expected = {1: 2 - 2 * k, r: 1 - k, r + 1: k - 1}
                got = {d: c for d, c in enumerate(diff) if c}
                assert got == expected

    def test_against_independent_expansion(self):
        for r in (2, 3, 4):
            for k in (Fraction(1), Fraction(2), Fraction(3, 2)):
                rep = numerator_identity_check(ArithParams(r, float(k)))
                o1, o2 = expand_numerators(r, k)
                p1 = {d: c for d, c in enumerate(Fraction(c) for c in rep.details["direct_numerator"]) if c}
                p2 = {d: c for d, c in enumerate(Fraction(c) for c in rep.details["factored_numerator"]) if c}
                assert p1 == o1
                assert p2 == o2

    def test_point_evaluation_at_weight_one(self):
        rep = numerator_identity_check(ArithParams(3, 1.0))
        z = 0.3
        p1 = sum(float(Fraction(c)) * z**d for d, c in enumerate(rep.details["direct_numerator"]))
        p2 = sum(float(Fraction(c)) * z**d for d, c in enumerate(rep.details["factored_numerator"]))
        assert abs(p1 - p2) <= 1e-15


class TestGlobalFactorization:
    def test_product_equals_exp_log_sum(self):
        # log/exp consistency of the product engine
        from meanval.primes import primes_up_to

        params = ArithParams(2, 1.0)
        s = 2.0
        value, _ = euler_product_truncated(params, s, 1000)
        direct = 1.0
        for p in primes_up_to(1000):
            direct *= local_factor(int(p), s, params)
        assert value == pytest.approx(direct, rel=1e-12)

    def test_series_truncation_monotone_in_limit(self):
        params = ArithParams(2, 1.0)
        v1, t1 = dirichlet_series_truncated(params, 2.0, 10**3)
        v2, _ = dirichlet_series_truncated(params, 2.0, 10**4)
        assert v2 > v1
        assert v2 - v1 <= t1  # dropped mass is inside the tail bound

    def test_three_way_agreement_weight_one(self):
        rep = global_factorization_check(2.0, ArithParams(2, 1.0), limit=10**4, cutoff=10**4)
        assert rep.passed
        assert rep.details["closed_form_within_bound"]

    def test_weight_two_series_product_agree_closed_form_gap_recorded(self):
        rep = global_factorization_check(2.0, ArithParams(2, 2.0), limit=10**4, cutoff=10**4)
        assert rep.passed  # Euler product route is definitional
        gap = abs(float(rep.details["closed_form_gap"]))
        bound = float(rep.details["closed_form_combined_bound"])
        assert gap > bound  # the closed form genuinely differs at k = 2
        assert not rep.details["closed_form_within_bound"]

    def test_domain_checks(self):
        with pytest.raises(ConfigError):
            global_factorization_check(1.4, ArithParams(2, 1.0))
        with pytest.raises(ConfigError):
            global_factorization_check(2.0, ArithParams(2, 1.0), limit=10)


class TestBatteryAndRendering:
    def test_battery_weight_one_all_pass(self):
        reports = run_battery(ArithParams(2, 1.0), limit=10**4, cutoff=10**4)
        assert all(rep.passed for rep in reports)

    def test_battery_deterministic_order(self):
        a = run_battery(ArithParams(2, 1.0), limit=10**3, cutoff=10**3)
        b = run_battery(ArithParams(2, 1.0), limit=10**3, cutoff=10**3)
        assert [r.identity for r in a] == [r.identity for r in b]
        assert [r.lhs for r in a] == [r.lhs for r in b]

    def test_render_table(self):
        reports = run_battery(ArithParams(2, 2.0), limit=10**3, cutoff=10**3)
        text = render_table(reports)
        assert "PASS" in text
        assert "FAIL" in text  # numerator identity fails at k = 2
        assert "GAP" in text  # closed-form row records the gap
        assert "global_factorization" in text

    def test_json_serializable(self):
        reports = run_battery(ArithParams(2, 1.0), limit=10**3, cutoff=10**3)
        payload = json.dumps([rep.to_json_obj() for rep in reports])
        parsed = json.loads(payload)
        assert all(rec["pass"] for rec in parsed)
