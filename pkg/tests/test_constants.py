"""Constants module: every returned ball must contain an independently
computed reference value, at a radius no larger than requested.

References are produced two ways, written before the implementation and
kept frozen: decimal strings pinned from independent derivations, and
high-precision brute-force sums evaluated right here with far more terms
than the implementation budgets.
"""

import math
from fractions import Fraction

import mpmath as mp
import pytest

from somos.balls import BallValue
from somos.constants import (
    PrecisionRequest,
    _tail_linear,
    _tail_quadratic,
    digit_moments,
    gamma_euler,
    khinchin,
    log_series_identity,
    somos,
    somos_b,
    somos_b_root_variant,
    somos_b_via_gamma,
    somos_recurrence,
)
from somos.errors import (
    OutOfDomainError,
    PrecisionUnreachableError,
    ResourceLimitError,
)

# frozen reference digits (derived independently of the implementation)
SOMOS_DIGITS = "1.6616879496335941213"
KHINCHIN_DIGITS = "2.685452001065306"
GAMMA_HALF_DIGITS = "0.37062651538301383446"
VAR_LOG_2 = "0.331401011178813"
RECURRENCE_VALUES = [1, 1, 2, 12, 576, 1658880, 16511297126400,
                     1908360529573854283038720000]


def contains(ball: BallValue, decimal: str) -> bool:
    with mp.workprec(350):
        return ball.lower <= mp.mpf(decimal) <= ball.upper


def sigma_b_oracle(b: int) -> mp.mpf:
    """Brute force at 300 bits with a term count far past any budget."""
    with mp.workprec(300):
        s = mp.fsum(mp.log(i) * mp.mpf(b) ** -i for i in range(2, 1200))
        return mp.exp((b - 1) * s)


def gamma_oracle(z: Fraction) -> mp.mpf:
    with mp.workprec(300):
        zm = mp.mpf(z.numerator) / z.denominator
        return mp.fsum(
            zm ** (i - 1) * (1 / mp.mpf(i) - mp.log1p(1 / mp.mpf(i)))
            for i in range(1, 1500)
        )


class TestSomos:
    def test_frozen_digits_and_radius(self):
        ball = somos()
        assert ball.rad <= 1e-10
        assert contains(ball, SOMOS_DIGITS)

    def test_tighter_precision(self):
        ball = somos(PrecisionRequest(target_radius=1e-14))
        assert ball.rad <= 1e-14
        assert contains(ball, SOMOS_DIGITS)

    def test_guaranteed_digits_are_correct_rounding(self):
        # the guaranteed string must be the true value correctly rounded
        # at its own length, and long enough to pin 10 significant digits
        gs = somos().guaranteed_str()
        places = len(gs.split(".")[1])
        assert places >= 9
        with mp.workprec(350):
            err = abs(mp.mpf(gs) - mp.mpf(SOMOS_DIGITS))
            assert err <= mp.mpf("0.5000001") * mp.mpf(10) ** -places

    @pytest.mark.parametrize("b", range(2, 11))
    def test_contains_brute_force_oracle(self, b):
        ball = somos_b(b)
        oracle = sigma_b_oracle(b)
        assert ball.lower <= oracle <= ball.upper
        assert ball.rad <= 1e-10

    def test_monotone_in_base(self):
        # larger base concentrates digit mass on 1, pushing sigma_b down
        mids = [float(somos_b(b).mid) for b in range(2, 12)]
        assert all(a > b for a, b in zip(mids, mids[1:]))

    def test_bad_base(self):
        with pytest.raises(ValueError):
            somos_b(1)

    def test_precision_request_validation(self):
        with pytest.raises(ValueError):
            PrecisionRequest(target_radius=0.0)
        with pytest.raises(ValueError):
            PrecisionRequest(target_radius=1e-10, max_terms=0)


class TestGammaRoute:
    @pytest.mark.parametrize("b", range(2, 11))
    def test_routes_overlap_and_both_contain_oracle(self, b):
        series = somos_b(b)
        via = somos_b_via_gamma(b)
        assert series.overlaps(via)
        oracle = sigma_b_oracle(b)
        assert via.lower <= oracle <= via.upper
        assert via.rad <= 1e-10

    def test_gamma_half_frozen(self):
        ball = gamma_euler(Fraction(1, 2))
        assert ball.rad <= 1e-10
        assert contains(ball, GAMMA_HALF_DIGITS)

    @pytest.mark.parametrize("z", [Fraction(1, 2), Fraction(1, 3),
                                   Fraction(1, 10), Fraction(3, 7)])
    def test_gamma_contains_oracle(self, z):
        ball = gamma_euler(z)
        oracle = gamma_oracle(z)
        assert ball.lower <= oracle <= ball.upper

    @pytest.mark.parametrize("z", [0, Fraction(-1, 3), Fraction(2, 3), 1])
    def test_gamma_domain(self, z):
        with pytest.raises(OutOfDomainError):
            gamma_euler(z)

    def test_root_variant(self):
        # sigma_3 root normalization is sqrt(sigma_3)
        ball = somos_b_root_variant(3)
        with mp.workprec(300):
            oracle = mp.sqrt(sigma_b_oracle(3))
        assert ball.lower <= oracle <= ball.upper
        assert ball.rad <= 1e-10

    @pytest.mark.parametrize("b", [2, 3, 10])
    def test_log_series_identity(self, b):
        check = log_series_identity(b)
        assert check.overlap
        with mp.workprec(200):
            v = mp.log(mp.mpf(b) / (b - 1))
            assert check.series.lower <= v <= check.series.upper


class TestKhinchin:
    def test_frozen_digits_and_radius(self):
        ball = khinchin()
        assert ball.rad <= 1e-6
        assert contains(ball, KHINCHIN_DIGITS)

    def test_six_digit_agreement(self):
        assert float(khinchin().mid) == pytest.approx(2.685452, abs=5e-7)

    def test_unreachable_precision_raises(self):
        with pytest.raises(PrecisionUnreachableError):
            khinchin(PrecisionRequest(target_radius=1e-12))


class TestDigitMoments:
    def test_mean_log_is_log_sigma(self):
        m = digit_moments(2)
        with mp.workprec(300):
            v = mp.log(sigma_b_oracle(2))
            assert m.mean_log.lower <= v <= m.mean_log.upper

    def test_var_log_frozen(self):
        m = digit_moments(2)
        assert contains(m.var_log, VAR_LOG_2)

    def test_var_log_brute_force_60_terms(self):
        # the check the acceptance text pins var_log against
        mean = sum((2 - 1) * 2 ** -i * math.log(i) for i in range(1, 61))
        second = sum((2 - 1) * 2 ** -i * math.log(i) ** 2 for i in range(1, 61))
        var = second - mean ** 2
        assert float(digit_moments(2).var_log.mid) == pytest.approx(
            var, abs=1e-9
        )

    @pytest.mark.parametrize("b", [2, 3, 5, 10])
    def test_var_positive_and_mean_digit_exact(self, b):
        m = digit_moments(b)
        assert m.var_log.lower > 0
        assert m.mean_digit == Fraction(b, b - 1)

    @pytest.mark.parametrize("b", [2, 3, 5])
    def test_second_moment_oracle(self, b):
        with mp.workprec(300):
            second = (b - 1) * mp.fsum(
                mp.log(i) ** 2 * mp.mpf(b) ** -i for i in range(2, 1200)
            )
            mean = mp.log(sigma_b_oracle(b))
            var = second - mean ** 2
        m = digit_moments(b)
        assert m.var_log.lower <= var <= m.var_log.upper


class TestTails:
    @pytest.mark.parametrize("x,n,extra", [
        (Fraction(1, 2), 5, 40), (Fraction(1, 3), 12, 50),
        (Fraction(1, 10), 3, 30), (Fraction(9, 10), 7, 60),
    ])
    def test_tail_formulas_telescope(self, x, n, extra):
        # tail(n) - tail(n+extra) must equal the explicit middle chunk
        mid_lin = sum(i * x ** i for i in range(n + 1, n + extra + 1))
        assert _tail_linear(x, n) - _tail_linear(x, n + extra) == mid_lin
        mid_quad = sum(i * i * x ** i for i in range(n + 1, n + extra + 1))
        assert _tail_quadratic(x, n) - _tail_quadratic(x, n + extra) == mid_quad

    def test_tails_positive_and_decreasing(self):
        x = Fraction(1, 3)
        vals = [_tail_linear(x, n) for n in range(1, 20)]
        assert all(v > 0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestRecurrence:
    def test_exact_values(self):
        steps = somos_recurrence(7)
        assert [s.value for s in steps] == RECURRENCE_VALUES

    def test_frozen_roots(self):
        steps = somos_recurrence(5)
        assert steps[3].root == pytest.approx(12 ** (1 / 8), rel=1e-12)
        assert steps[5].root == pytest.approx(1658880 ** (1 / 32), rel=1e-12)

    def test_roots_match_partial_sums(self):
        steps = somos_recurrence(30)
        for n in range(1, 31):
            partial = math.fsum(
                math.log(k) * 0.5 ** k for k in range(1, n + 1)
            )
            assert abs(steps[n].root - math.exp(partial)) < 1e-12

    def test_roots_increase_toward_sigma(self):
        steps = somos_recurrence(40)
        roots = [s.root for s in steps]
        assert all(a <= b for a, b in zip(roots[1:], roots[2:]))
        assert all(a < b for a, b in zip(roots[2:], roots[3:]))
        sigma = float(somos().mid)
        assert all(r < sigma for r in roots[1:])
        assert roots[-1] == pytest.approx(sigma, abs=1e-10)

    def test_budget_cutoff_and_require_exact(self):
        steps = somos_recurrence(40, bit_budget=10_000)
        has = [s.value is not None for s in steps]
        assert has[0] and not has[-1]
        assert has.index(False) > 5    # budget allows the small ones
        # once exactness stops it never resumes
        assert all(not h for h in has[has.index(False):])
        with pytest.raises(ResourceLimitError):
            somos_recurrence(40, bit_budget=10_000, require_exact=True)

    def test_log_values_consistent_with_exact(self):
        for s in somos_recurrence(20):
            if s.value is not None and s.n >= 1:
                assert s.log_value == pytest.approx(
                    math.log(s.value), rel=1e-13
                )

    def test_negative_n(self):
        with pytest.raises(ValueError):
            somos_recurrence(-1)
