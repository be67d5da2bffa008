"""Rigorously enclosed constants of the digit dynamics.

The base-b constant is

    sigma_b = exp( (b-1) * sum_{i>=2} b^-i * log i ),

the geometric-mean limit of the digits; sigma_2 = 1.6616879496... is
Somos' quadratic recurrence constant.  A second route goes through the
generalized Euler-constant function

    gamma(z) = sum_{i>=1} z^(i-1) * (1/i - log((i+1)/i)),  0 < z <= 1/2,

via sigma_b = (b/(b-1)) * exp(-gamma(1/b)/b); the two routes are kept
independent so they can cross-check each other.  Khinchin's constant
K = 2.6854520010... enters as the continued-fraction analogue of the
same geometric-mean phenomenon.

Every function returns a BallValue whose radius accounts for the exact
closed-form series tail (a rational, from log i < i and geometric sums)
plus a conservative rounding allowance.  Nothing here trusts floats to
be accurate; floats are only trusted to be IEEE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .balls import (
    BallValue,
    b_exp,
    b_mul,
    b_scale,
    b_sub,
    from_interval,
)
from .errors import (
    OutOfDomainError,
    PrecisionUnreachableError,
    ResourceLimitError,
)

__all__ = [
    "PrecisionRequest",
    "DigitMoments",
    "IdentityCheck",
    "RecurrenceStep",
    "somos",
    "somos_b",
    "gamma_euler",
    "somos_b_via_gamma",
    "somos_b_root_variant",
    "log_series_identity",
    "khinchin",
    "digit_moments",
    "somos_recurrence",
]


@dataclass(frozen=True)
class PrecisionRequest:
    """Ask for an enclosure of radius <= target_radius within max_terms."""

    target_radius: float = 1e-10
    max_terms: int = 10 ** 6

    def __post_init__(self) -> None:
        if not 0 < self.target_radius < 1:
            raise ValueError("target radius must be in (0, 1)")
        if self.max_terms < 4:
            raise ValueError("max_terms must be >= 4")


def _request(p, default_radius: float, default_cap: int) -> PrecisionRequest:
    if p is None:
        return PrecisionRequest(default_radius, default_cap)
    if isinstance(p, PrecisionRequest):
        return p
    return PrecisionRequest(float(p), default_cap)


def _wp(target: float) -> int:
    return max(64, int(-math.log2(target)) + 48)


def _mpf_frac(x: Fraction) -> mp.mpf:
    """Fraction -> mpf at the current working precision (one rounding)."""
    return mp.mpf(x.numerator) / x.denominator


def _tail_linear(x: Fraction, n: int) -> Fraction:
    """Exact sum_{i>n} i * x^i for 0 < x < 1."""
    r = 1 - x
    return x ** (n + 1) * (Fraction(n + 1) / r + x / r ** 2)


def _tail_quadratic(x: Fraction, n: int) -> Fraction:
    """Exact sum_{i>n} i^2 * x^i for 0 < x < 1."""
    r = 1 - x
    return x ** (n + 1) * (
        Fraction((n + 1) ** 2) / r + 2 * (n + 1) * x / r ** 2 + x * (1 + x) / r ** 3
    )


def _pick_terms(tail_at, budget: Fraction, cap: int, start: int = 2) -> int:
    """Smallest n <= cap with tail_at(n) <= budget."""
    n = start
    while tail_at(n) > budget:
        n += 1
        if n > cap:
            raise PrecisionUnreachableError(
                f"series tail still above {float(budget):.3g} after {cap} terms"
            )
    return n


def _round_allowance(n_terms: int, scale) -> mp.mpf:
    """Crude upper bound on accumulated round-to-nearest error of a sum
    of n_terms values of total magnitude <= scale, each built from O(1)
    library calls.  Orders of magnitude below the tail at our working
    precisions, so being crude is free."""
    return (3 * n_terms + 32) * mp.mpf(2) ** (1 - mp.mp.prec) * scale


def _ball_from_partial(partial: mp.mpf, tail: mp.mpf, allowance: mp.mpf) -> BallValue:
    """Enclosure [partial - allowance, partial + tail + allowance], centered.

    The true sum exceeds the partial sum by at most the (nonnegative)
    tail; the allowance absorbs all rounding, including this centering.
    """
    return BallValue(partial + tail / 2, tail / 2 + allowance)


def _log_sigma_ball(b: int, log_target: float, cap: int) -> BallValue:
    """Ball around log sigma_b = (b-1) * sum_{i>=2} b^-i log i."""
    budget = Fraction(log_target) / 2
    x = Fraction(1, b)
    n = _pick_terms(lambda k: (b - 1) * _tail_linear(x, k), budget, cap)
    terms = [mp.log(i) * mp.mpf(b) ** -i for i in range(2, n + 1)]
    partial = mp.fsum(terms) * (b - 1)
    tail = _mpf_frac((b - 1) * _tail_linear(x, n))
    return _ball_from_partial(partial, tail, _round_allowance(n, abs(partial) + 1))


def somos_b(b: int, precision=None) -> BallValue:
    """The base-b constant sigma_b, enclosed via its log series."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    req = _request(precision, 1e-10, 10 ** 6)
    with mp.workprec(_wp(req.target_radius)):
        log_ball = _log_sigma_ball(b, req.target_radius / 2.5, req.max_terms)
        out = b_exp(log_ball)
    if not out.rad <= req.target_radius:
        raise PrecisionUnreachableError(
            f"achieved radius {mp.nstr(out.rad, 3)} above target"
        )
    return out


def somos(precision=None) -> BallValue:
    """Somos' quadratic recurrence constant sigma = sigma_2."""
    return somos_b(2, precision)


def gamma_euler(z, precision=None) -> BallValue:
    """Generalized Euler constant gamma(z) for exact rational 0 < z <= 1/2.

    Term i is z^(i-1) * (1/i - log(1+1/i)); since 0 < 1/i - log(1+1/i)
    <= 1/(2 i^2), the tail past n is at most z^n / (2 (n+1)^2 (1-z)).
    """
    z = Fraction(z)
    if not 0 < z <= Fraction(1, 2):
        raise OutOfDomainError(f"z must be in (0, 1/2], got {z}")
    req = _request(precision, 1e-10, 10 ** 6)
    with mp.workprec(_wp(req.target_radius)):
        budget = Fraction(req.target_radius) / 2
        tail_at = lambda n: z ** n / (2 * (n + 1) ** 2 * (1 - z))
        n = _pick_terms(tail_at, budget, req.max_terms, start=1)
        zm = mp.mpf(z.numerator) / z.denominator
        terms = []
        for i in range(1, n + 1):
            u = 1 / mp.mpf(i) - mp.log1p(1 / mp.mpf(i))
            terms.append(zm ** (i - 1) * u)
        partial = mp.fsum(terms)
        tail = _mpf_frac(tail_at(n))
        # the 1/i - log1p(1/i) difference cancels ~log2(i) bits; charge
        # the allowance against the un-cancelled magnitude sum_i z^(i-1)/i
        out = _ball_from_partial(partial, tail, _round_allowance(n, 2 / (1 - zm)))
    if not out.rad <= req.target_radius:
        raise PrecisionUnreachableError(
            f"achieved radius {mp.nstr(out.rad, 3)} above target"
        )
    return out


def somos_b_via_gamma(b: int, precision=None) -> BallValue:
    """sigma_b through the identity sigma_b = (b/(b-1)) exp(-gamma(1/b)/b).

    Independent of somos_b: different series, different tail bound.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    req = _request(precision, 1e-10, 10 ** 6)
    with mp.workprec(_wp(req.target_radius)):
        inner = gamma_euler(
            Fraction(1, b),
            PrecisionRequest(req.target_radius * b / 5, req.max_terms),
        )
        out = b_scale(b_exp(b_scale(inner, Fraction(-1, b))), Fraction(b, b - 1))
    if not out.rad <= req.target_radius:
        raise PrecisionUnreachableError(
            f"achieved radius {mp.nstr(out.rad, 3)} above target"
        )
    return out


def somos_b_root_variant(b: int, precision=None) -> BallValue:
    """The normalization sigma_b^(1/(b-1)) some references tabulate."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    req = _request(precision, 1e-10, 10 ** 6)
    with mp.workprec(_wp(req.target_radius)):
        log_ball = _log_sigma_ball(
            b, req.target_radius * (b - 1) / 3, req.max_terms
        )
        out = b_exp(b_scale(log_ball, Fraction(1, b - 1)))
    if not out.rad <= req.target_radius:
        raise PrecisionUnreachableError(
            f"achieved radius {mp.nstr(out.rad, 3)} above target"
        )
    return out


@dataclass(frozen=True)
class IdentityCheck:
    """Two independent enclosures of the same quantity, and whether they
    are consistent (overlap)."""

    b: int
    series: BallValue
    closed_form: BallValue
    overlap: bool

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "series": self.series.to_json(),
            "closed_form": self.closed_form.to_json(),
            "overlap": self.overlap,
        }


def log_series_identity(b: int, precision=None) -> IdentityCheck:
    """Check sum_{i>=1} b^-i / i = log(b/(b-1)) as two enclosures.

    This is the series identity the gamma route of sigma_b rests on, so
    it gets its own verifiable artifact.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    req = _request(precision, 1e-12, 10 ** 6)
    with mp.workprec(_wp(req.target_radius)):
        x = Fraction(1, b)
        tail_at = lambda n: x ** n / ((n + 1) * (b - 1))
        n = _pick_terms(tail_at, Fraction(req.target_radius) / 2, req.max_terms, 1)
        terms = [mp.mpf(b) ** -i / i for i in range(1, n + 1)]
        partial = mp.fsum(terms)
        tail = _mpf_frac(tail_at(n))
        series = _ball_from_partial(
            partial, tail, _round_allowance(n, abs(partial) + 1)
        )
        closed_mid = mp.log(mp.mpf(b) / (b - 1))
        closed = BallValue(
            closed_mid, 8 * mp.mpf(2) ** (1 - mp.mp.prec) * (1 + abs(closed_mid))
        )
    return IdentityCheck(b, series, closed, series.overlaps(closed))


def khinchin(precision=None) -> BallValue:
    """Khinchin's constant K = prod_i (1 + 1/(i(i+2)))^(log2 i).

    log K = (1/log 2) * sum_{i>=2} log(i) * log1p(1/(i(i+2))); terms are
    positive and <= log(i)/(i^2 log 2), so the tail past N is below
    (log N + 1)/(N log 2) by integral comparison.  The partial sum runs
    in float64 on the hot-kernel backend; tens of millions of terms are
    needed, which is why this is the one constant with a practical
    precision floor (~1e-7 near the default term cap).
    """
    req = _request(precision, 1e-6, 2 * 10 ** 9)
    target = req.target_radius
    ln2 = math.log(2)

    def bound(n: int) -> float:
        return (math.log(n) + 1) / (n * ln2)

    # enclosure is [S, S + bound]; after exp the radius is ~K * bound / 2,
    # so aim the full bound at 0.65 * target / K_hi
    width_goal = 0.65 * target / 2.69
    if bound(req.max_terms) > width_goal:
        raise PrecisionUnreachableError(
            f"target {target:.2g} needs more than {req.max_terms} terms; "
            f"reachable radius at the cap is about "
            f"{2.69 * bound(req.max_terms) / 1.3:.2g}"
        )
    lo, hi = 16, req.max_terms
    while lo < hi:
        mid = (lo + hi) // 2
        if bound(mid) <= width_goal:
            hi = mid
        else:
            lo = mid + 1
    n = lo

    from ._kernels import khinchin_partial

    s_raw = khinchin_partial(2, n + 1)
    with mp.workprec(96):
        s_ln = mp.mpf(s_raw) / mp.log(2)
        pad = mp.mpf(2e-13)  # float64 summation + per-term libm error
        tail = mp.mpf(bound(n)) * (1 + mp.mpf(2) ** -40)
        out = b_exp(from_interval(s_ln - pad, s_ln + tail + pad))
    if not out.rad <= target:
        raise PrecisionUnreachableError(
            f"achieved radius {mp.nstr(out.rad, 3)} above target"
        )
    return out


@dataclass(frozen=True)
class DigitMoments:
    """Mean and variance of log(digit), plus the exact mean digit, under
    the invariant measure P(digit = i) = (b-1) b^-i."""

    b: int
    mean_log: BallValue
    var_log: BallValue
    mean_digit: Fraction

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "mean_log": self.mean_log.to_json(),
            "var_log": self.var_log.to_json(),
            "mean_digit": f"{self.mean_digit.numerator}/{self.mean_digit.denominator}",
        }


def digit_moments(b: int, precision=None) -> DigitMoments:
    """Moments of the log-digit observable; mean_log = log sigma_b.

    The variance uses (log i)^2 < i^2 for its exact quadratic tail.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    req = _request(precision, 1e-10, 10 ** 6)
    target = req.target_radius
    with mp.workprec(_wp(target)):
        mean = _log_sigma_ball(b, target / 8, req.max_terms)
        x = Fraction(1, b)
        n = _pick_terms(
            lambda k: (b - 1) * _tail_quadratic(x, k),
            Fraction(target) / 4, req.max_terms,
        )
        terms = [mp.log(i) ** 2 * mp.mpf(b) ** -i for i in range(2, n + 1)]
        partial = mp.fsum(terms) * (b - 1)
        tail = _mpf_frac((b - 1) * _tail_quadratic(x, n))
        second = _ball_from_partial(
            partial, tail, _round_allowance(n, abs(partial) + 1)
        )
        var = b_sub(second, b_mul(mean, mean))
    if not (mean.rad <= target and var.rad <= target):
        raise PrecisionUnreachableError("moment radii above target")
    return DigitMoments(b, mean, var, Fraction(b, b - 1))


@dataclass(frozen=True)
class RecurrenceStep:
    """One step of g_n = n * g_{n-1}^2 with g_0 = 1.

    value is the exact integer while it fits the bit budget, else None
    (g_n has ~0.733 * 2^n bits, so exactness ends near n = 22 for the
    default budget).  root = g_n^(2^-n) is always computed, through the
    float recursion log g_n = log n + 2 log g_{n-1}; the roots increase
    toward sigma.
    """

    n: int
    value: int | None
    root: float
    log_value: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "value": str(self.value) if self.value is not None else None,
            "root": self.root,
            "log_value": self.log_value,
        }


def somos_recurrence(n: int, *, bit_budget: int = 4_000_000,
                     require_exact: bool = False) -> tuple[RecurrenceStep, ...]:
    """Steps 0..n of the quadratic recurrence g_n = n * g_{n-1}^2.

    1, 1, 2, 12, 576, 1658880, ...; the 2^n-th roots converge to sigma.
    With require_exact=True a step whose integer would exceed bit_budget
    raises ResourceLimitError instead of dropping to logs only.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    steps = [RecurrenceStep(0, 1, 1.0, 0.0)]
    g: int | None = 1
    log_g = 0.0
    for k in range(1, n + 1):
        if g is not None:
            if 2 * g.bit_length() + k.bit_length() + 1 > bit_budget:
                if require_exact:
                    raise ResourceLimitError(
                        f"exact g_{k} would exceed the {bit_budget}-bit budget"
                    )
                g = None
            else:
                g = k * g * g
        log_g = math.log(k) + 2.0 * log_g
        root = math.exp(log_g * 0.5 ** k)
        steps.append(RecurrenceStep(k, g, root, log_g))
    return tuple(steps)
