"""Midpoint-radius interval values (balls) over mpmath floats.

A BallValue asserts |true - mid| <= rad.  Operations run at the ambient
mpmath working precision and keep that assertion conservatively: every
radius update is padded upward by a relative 2^-40 plus a few ulps of
the midpoint, which swamps the round-to-nearest error of the radius
arithmetic itself as long as the working precision stays above ~50 bits
(the precision helpers in this package never go below 64).

Radii are tracked loosely on purpose.  Targets in this package are
1e-6..1e-12 while working precisions give ulps below 1e-28, so leaking
a factor of two of slack into the radius costs nothing and keeps the
propagation rules auditable by eye.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

__all__ = ["BallValue", "exact_ball", "from_interval", "b_add", "b_sub",
           "b_mul", "b_scale", "b_exp"]


def _eps() -> mp.mpf:
    return mp.mpf(2) ** (2 - mp.mp.prec)


def _up(x) -> mp.mpf:
    """Pad a radius computed in round-to-nearest so it bounds from above."""
    return x * (1 + mp.mpf(2) ** -40) + mp.mpf(2) ** -1060


@dataclass(frozen=True)
class BallValue:
    """A real known to lie within rad of mid."""

    mid: mp.mpf
    rad: mp.mpf

    def __post_init__(self) -> None:
        object.__setattr__(self, "mid", mp.mpf(self.mid))
        object.__setattr__(self, "rad", mp.mpf(self.rad))
        if self.rad < 0:
            raise ValueError("radius must be >= 0")

    @property
    def lower(self) -> mp.mpf:
        return self.mid - self.rad

    @property
    def upper(self) -> mp.mpf:
        return self.mid + self.rad

    def contains(self, x) -> bool:
        if isinstance(x, Fraction):
            with mp.workprec(max(mp.mp.prec, 128)):
                x = mp.mpf(x.numerator) / x.denominator
        return abs(self.mid - mp.mpf(x)) <= self.rad

    def overlaps(self, other: "BallValue") -> bool:
        return abs(self.mid - other.mid) <= self.rad + other.rad

    def widened(self, extra) -> "BallValue":
        return BallValue(self.mid, _up(self.rad + mp.mpf(extra)))

    def guaranteed_str(self, max_digits: int = 30) -> str:
        """Longest decimal string every point of the ball rounds to.

        Rounding at d significant digits is monotone, so if lower and
        upper agree after rounding, the true value rounds there too: all
        printed digits are guaranteed (as a correct rounding).
        """
        with mp.workprec(max(mp.mp.prec, 160)):
            lo, hi = self.lower, self.upper
            for d in range(max_digits, 0, -1):
                s_lo = mp.nstr(lo, d, strip_zeros=False)
                s_hi = mp.nstr(hi, d, strip_zeros=False)
                if s_lo == s_hi:
                    return s_lo
        return mp.nstr(self.mid, 1)

    def __str__(self) -> str:
        return f"{self.guaranteed_str()} +/- {mp.nstr(self.rad, 3)}"

    def to_json(self) -> dict:
        digits = max(17, int(mp.mp.prec * 0.302) + 2)
        return {
            "mid": mp.nstr(self.mid, digits, strip_zeros=True),
            "rad": mp.nstr(self.rad, 5),
        }


def exact_ball(x: Fraction | int) -> BallValue:
    """Ball around an exact rational, radius = conversion rounding only."""
    x = Fraction(x)
    mid = mp.mpf(x.numerator) / x.denominator
    return BallValue(mid, _up(2 * _eps() * abs(mid)))


def from_interval(lo, hi) -> BallValue:
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    if hi < lo:
        raise ValueError("interval endpoints out of order")
    mid = (lo + hi) / 2
    return BallValue(mid, _up((hi - lo) / 2 + _eps() * abs(mid)))


def b_add(a: BallValue, b: BallValue) -> BallValue:
    mid = a.mid + b.mid
    return BallValue(mid, _up(a.rad + b.rad + _eps() * abs(mid)))


def b_sub(a: BallValue, b: BallValue) -> BallValue:
    mid = a.mid - b.mid
    return BallValue(mid, _up(a.rad + b.rad + _eps() * abs(mid)))


def b_mul(a: BallValue, b: BallValue) -> BallValue:
    mid = a.mid * b.mid
    rad = abs(a.mid) * b.rad + abs(b.mid) * a.rad + a.rad * b.rad
    return BallValue(mid, _up(rad + _eps() * abs(mid)))


def b_scale(a: BallValue, c: Fraction | int) -> BallValue:
    """Multiply by an exact rational."""
    c = Fraction(c)
    cm = mp.mpf(c.numerator) / c.denominator
    mid = a.mid * cm
    return BallValue(mid, _up(abs(cm) * a.rad + 3 * _eps() * abs(mid)))


def b_exp(a: BallValue) -> BallValue:
    mid = mp.exp(a.mid)
    rad = mid * (mp.expm1(a.rad) + 4 * _eps())
    return BallValue(mid, _up(rad))
