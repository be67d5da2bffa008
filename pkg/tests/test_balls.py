"""Ball arithmetic: every operation must produce an enclosure of the
exact result, with radii that stay honest rather than tight."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from somos.balls import (
    BallValue,
    b_add,
    b_exp,
    b_mul,
    b_scale,
    b_sub,
    exact_ball,
    from_interval,
)

nice_rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=10 ** 6
)


def contains_frac(ball: BallValue, x: Fraction) -> bool:
    with mp.workprec(300):
        v = mp.mpf(x.numerator) / x.denominator
        return ball.lower <= v <= ball.upper


class TestBallValue:
    def test_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            BallValue(mp.mpf(1), mp.mpf(-1e-20))

    def test_contains_and_bounds(self):
        ball = BallValue(mp.mpf(2), mp.mpf("0.5"))
        assert ball.lower == mp.mpf("1.5")
        assert ball.upper == mp.mpf("2.5")
        assert ball.contains(mp.mpf(2.2))
        assert not ball.contains(mp.mpf(2.6))

    def test_overlap_is_symmetric_and_correct(self):
        a = BallValue(mp.mpf(1), mp.mpf("0.1"))
        b = BallValue(mp.mpf("1.15"), mp.mpf("0.1"))
        c = BallValue(mp.mpf(2), mp.mpf("0.1"))
        assert a.overlaps(b) and b.overlaps(a)
        assert not a.overlaps(c) and not c.overlaps(a)

    def test_widened(self):
        a = BallValue(mp.mpf(1), mp.mpf(0))
        assert a.widened(1e-3).rad >= mp.mpf("1e-3")

    def test_guaranteed_str_rounds_truly(self):
        # interval straddling a rounding boundary forces a short string
        ball = from_interval("1.2349", "1.2351")
        s = ball.guaranteed_str()
        assert s.startswith("1.23")
        assert "1.235" != s[:5] or float(s) == pytest.approx(1.235, abs=1e-9)

    def test_guaranteed_str_known_value(self):
        # at 8 digits the endpoints round apart, at 7 they agree
        ball = from_interval("2.7182818", "2.7182819")
        assert ball.guaranteed_str() == "2.718282"

    def test_str_mentions_radius(self):
        assert "+/-" in str(exact_ball(Fraction(1, 3)))

    def test_to_json_fields(self):
        d = exact_ball(Fraction(3, 7)).to_json()
        assert set(d) == {"mid", "rad"}


class TestConstructors:
    @given(nice_rationals)
    @settings(max_examples=200, deadline=None)
    def test_exact_ball_contains_value(self, x):
        assert contains_frac(exact_ball(x), x)

    def test_from_interval_orders_endpoints(self):
        with pytest.raises(ValueError):
            from_interval(2, 1)

    def test_from_interval_contains_both_ends(self):
        ball = from_interval("0.1", "0.2")
        assert ball.contains(mp.mpf("0.1")) and ball.contains(mp.mpf("0.2"))


class TestArithmetic:
    @given(nice_rationals, nice_rationals)
    @settings(max_examples=200, deadline=None)
    def test_add_sub_mul_enclose_exact(self, x, y):
        bx, by = exact_ball(x), exact_ball(y)
        assert contains_frac(b_add(bx, by), x + y)
        assert contains_frac(b_sub(bx, by), x - y)
        assert contains_frac(b_mul(bx, by), x * y)

    @given(nice_rationals, nice_rationals)
    @settings(max_examples=200, deadline=None)
    def test_scale_encloses_exact(self, x, c):
        assert contains_frac(b_scale(exact_ball(x), c), c * x)

    @given(
        st.fractions(
            min_value=Fraction(-8), max_value=Fraction(8),
            max_denominator=10 ** 4,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_exp_encloses_exact(self, x):
        ball = b_exp(exact_ball(x))
        with mp.workprec(300):
            v = mp.exp(mp.mpf(x.numerator) / x.denominator)
            assert ball.lower <= v <= ball.upper

    def test_exp_radius_grows_with_input_radius(self):
        narrow = b_exp(BallValue(mp.mpf(1), mp.mpf("1e-20")))
        wide = b_exp(BallValue(mp.mpf(1), mp.mpf("1e-5")))
        assert wide.rad > narrow.rad

    def test_interval_arithmetic_sanity(self):
        # ball product of [1,2] * [3,4]: mid 5.25, radius 2.75 plus
        # padding (midpoint form over-covers the exact range [3,8])
        a = from_interval(1, 2)
        b = from_interval(3, 4)
        prod = b_mul(a, b)
        assert prod.lower <= 3 and prod.upper >= 8
        assert prod.lower > 2.4 and prod.upper < 8.1
