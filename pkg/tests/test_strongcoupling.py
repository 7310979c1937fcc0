"""Tests for the strong-coupling coefficient extraction."""

import pytest
from gmpy2 import mpq
from mpmath import mp, mpf

from anharmonic.numerics import PrecisionContext, render, to_real
from anharmonic.strongcoupling import (
    DEFAULT_SCHEDULE,
    FrequencySchedule,
    alpha,
    alpha_across_orders,
    alpha_table,
    schedule_frequency,
    schedule_lambda,
    w_derivative_at_zero,
)

import oracles
from published import TABLE1

CTX = PrecisionContext(80, 25)


class TestSchedule:
    def test_constant_window(self):
        with pytest.raises(ValueError):
            FrequencySchedule(c=mpq(1, 5))  # 0.2 outside (0.18, 0.19)
        with pytest.raises(ValueError):
            FrequencySchedule(correction=mpq(-1))

    def test_lambda_at_order_one(self):
        # frozen from the doubled-precision evaluation of 1/(4c(1 + 6.85))
        v = schedule_lambda(1, ctx=CTX)
        assert render(v, 20) == "0.17117764343753131747"

    def test_lambda_regression_at_251(self):
        v = schedule_lambda(251, ctx=CTX)
        assert render(v, 20) == "0.0045673009628544550826"

    def test_lambda_asymptotics(self):
        """lambda_N * 4cN -> 1 from below as N grows."""
        ctx = PrecisionContext(60, 25)
        c = to_real(mpq(DEFAULT_SCHEDULE.c), ctx)
        products = []
        for N in (10, 1000, 10 ** 6):
            products.append(schedule_lambda(N, ctx=ctx) * 4 * c * N)
        assert all(p < 1 for p in products)
        assert products[0] < products[1] < products[2]
        assert abs(products[2] - 1) < mpf("1e-3")

    def test_frequency_matches_lambda(self):
        # Omega_N^3 * lambda_N = g/4 by construction
        ctx = CTX
        g = mpf(3)
        with ctx.guard():
            om = schedule_frequency(7, g, ctx=ctx)
            lam = schedule_lambda(7, ctx=ctx)
            assert abs(om ** 3 * lam - g / 4) <= (g / 4) * mpf(10) ** -75

    def test_requires_positive_order(self):
        with pytest.raises(ValueError):
            schedule_lambda(0)


class TestDerivativeAtZero:
    def test_order_one_closed_form(self, bw12):
        # v_1^(0)(lambda, 0) = 1/4 + (3/4) lambda, exactly
        for lam in (mpq(1, 6), mpq(2, 7), mpq(5)):
            assert w_derivative_at_zero(bw12, 1, lam, 0) == mpq(1, 4) + mpq(3, 4) * lam

    def test_vanishes_above_polynomial_degree(self, bw12):
        for N in (1, 2, 5):
            assert w_derivative_at_zero(bw12, N, mpq(1, 6), N + 1) == 0

    def test_rational_and_float_modes_agree(self, bw12):
        lam_q = mpq(1, 6)
        for (N, n) in ((2, 1), (5, 0), (10, 3)):
            exact = w_derivative_at_zero(bw12, N, lam_q, n)
            approx = w_derivative_at_zero(bw12, N, to_real(lam_q, CTX), n, CTX)
            assert abs(approx - to_real(mpq(exact), CTX)) <= abs(approx) * mpf(10) ** -70

    def test_against_finite_difference_example(self, bw12):
        # n=1, N=2 at lambda = 1/6, vs a centered difference at high precision
        lam = to_real(mpq(1, 6), CTX)
        ours = w_derivative_at_zero(bw12, 2, lam, 1, CTX)
        fd = oracles.fd_derivative_at_zero(bw12, 2, lam, 1, dps=120, h_exp=-30)
        with mp.workdps(50):
            assert abs(ours - fd) <= abs(ours) * mpf(10) ** -30

    def test_input_validation(self, bw12):
        with pytest.raises(ValueError):
            w_derivative_at_zero(bw12, 0, mpq(1, 6), 0)
        with pytest.raises(ValueError):
            w_derivative_at_zero(bw12, 13, mpq(1, 6), 0)
        with pytest.raises(ValueError):
            w_derivative_at_zero(bw12, 2, mpq(-1, 6), 0)
        with pytest.raises(ValueError):
            w_derivative_at_zero(bw12, 2, mpq(1, 6), -1)


class TestAlpha:
    def test_extremal_order_one(self, bw12):
        """At the exact N=1 extremum lambda = 1/6, alpha_0 = (3/8) 6^(1/3)."""
        lam = to_real(mpq(1, 6), CTX)
        v = w_derivative_at_zero(bw12, 1, mpq(1, 6), 0)
        assert v == mpq(3, 8)
        from anharmonic.numerics import pow_rational_exponent

        with CTX.guard():
            value = to_real(v, CTX) * pow_rational_exponent(lam, -1, 3, CTX)
            closed = mpf(3) / 8 * mp.cbrt(6)
            assert abs(value - closed) <= closed * mpf(10) ** -70
            assert render(closed, 7) == "0.6814202"

    def test_schedule_order_one(self, bw12):
        # frozen from the doubled-precision run; slightly above the extremal
        # value 0.68142... because lambda_1 sits off the exact extremum
        rec = alpha(bw12, 1, 0, ctx=CTX)
        assert render(rec.value, 20) == "0.68147438341254700961"

    def test_metadata(self, bw12):
        rec = alpha(bw12, 5, 2, ctx=CTX)
        assert (rec.n, rec.N, rec.working_digits) == (2, 5, 80)

    def test_table_consistent_with_single_calls(self, bw12):
        table = alpha_table(bw12, 12, 3, ctx=CTX)
        for n, rec in enumerate(table):
            assert rec.value == alpha(bw12, 12, n, ctx=CTX).value
            assert rec.n == n

    def test_sweep_bit_identical_to_single_calls(self, bw12):
        sweep = alpha_across_orders(bw12, 0, 5, 12, ctx=CTX)
        assert [r.N for r in sweep] == list(range(5, 13))
        for rec in sweep:
            assert rec.value == alpha(bw12, rec.N, 0, ctx=CTX).value

    def test_validation(self, bw12):
        with pytest.raises(ValueError):
            alpha(bw12, 13, 0)
        with pytest.raises(ValueError):
            alpha(bw12, 5, -1)
        with pytest.raises(ValueError):
            alpha_across_orders(bw12, 0, 8, 5)


@pytest.mark.slow
class TestAgainstPublishedTable:
    def test_sign_pattern_with_irregularities(self, alphas251):
        """Alternation breaks exactly at n = 9 (negative), 10 (positive),
        and 15, 16 (both negative)."""
        expected_signs = [1 if TABLE1[n][0] != "-" else -1 for n in range(23)]
        for n in range(23):
            assert (1 if alphas251[n].value > 0 else -1) == expected_signs[n]
        assert expected_signs[8] == expected_signs[9] == -1
        assert expected_signs[10] == 1
        assert expected_signs[15] == expected_signs[16] == -1

    def test_convergence_between_orders(self, bw251):
        """|(alpha_0)_N - alpha_0(251)| shrinks from N = 100 to N = 200."""
        ref = alpha(bw251, 251, 0).value
        d100 = abs(alpha(bw251, 100, 0).value - ref)
        d200 = abs(alpha(bw251, 200, 0).value - ref)
        assert d200 < d100
