"""Acceptance gate: one test per acceptance criterion, each printing a
single PASS/FAIL line with its measured runtime against the stated
budget.  Run with `pytest tests/test_acceptance.py -v -s` to see the
lines stream; they also appear in captured output on failure.

Budgets assume warmed-up kernels; the module fixture pays any JIT cost
before the first timed section.
"""

import math
import random
import time
from fractions import Fraction

import mpmath as mp
import pytest

from somos import (
    DigitSeq,
    RationalInterval,
    apply_shift,
    decode_exact,
    decode_prefix,
    digit_moments,
    encode_digits,
    khinchin,
    somos,
    somos_b,
    somos_b_via_gamma,
    somos_recurrence,
    verify_lebesgue_invariance,
    verify_shift_invariance,
)
from somos._kernels import warmup
from somos.rng import trajectory_seed
from somos.simulate import (
    chi_square_gof,
    lebesgue_orbit_experiment,
    run_ensemble,
    run_trajectory,
    two_sample_chi_square,
)

SOMOS_REF = "1.6616879496335941213"
KHINCHIN_REF = "2.685452001065306"


@pytest.fixture(scope="module", autouse=True)
def _warm():
    warmup()
    digit_moments(2)   # primes mpmath contexts too


def report(num: int, ok: bool, detail: str, elapsed: float,
           budget: float) -> None:
    verdict = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"{verdict} criterion {num}: {detail} "
          f"[{elapsed:.2f}s / budget {budget:.0f}s]")
    assert ok, f"criterion {num}: {detail}"
    assert elapsed < budget, f"criterion {num} over budget: {elapsed:.2f}s"


def contains(ball, decimal: str) -> bool:
    with mp.workprec(350):
        return ball.lower <= mp.mpf(decimal) <= ball.upper


def test_criterion_1_constant_digits():
    t0 = time.perf_counter()
    sigma = somos()
    t_sigma = time.perf_counter() - t0
    ok_sigma = (
        f"{float(sigma.mid):.10f}" == "1.6616879496"
        and sigma.rad <= 1e-10
        and contains(sigma, SOMOS_REF)
        and t_sigma < 1.0
    )
    t0 = time.perf_counter()
    k = khinchin()
    t_k = time.perf_counter() - t0
    ok_k = (
        f"{float(k.mid):.6f}" == "2.685452"
        and k.rad <= 1e-6
        and contains(k, KHINCHIN_REF)
    )
    report(
        1, ok_sigma and ok_k,
        f"somos 10 digits in {t_sigma:.2f}s; khinchin 6 digits "
        f"rad={float(k.rad):.1e}",
        t_k, 60.0,
    )


def test_criterion_2_cross_route_overlap():
    t0 = time.perf_counter()
    ok = True
    for b in range(2, 11):
        series = somos_b(b)
        via = somos_b_via_gamma(b)
        ok = ok and series.rad <= 1e-10 and via.rad <= 1e-10 \
            and series.overlaps(via)
    elapsed = time.perf_counter() - t0
    report(2, ok, "series and gamma routes overlap for b=2..10",
           elapsed, 1.0)


def test_criterion_3_exact_invariance():
    gen = random.Random(20240817)
    t0 = time.perf_counter()
    ok = True
    for i in range(1000):
        den_a, den_b = gen.randint(2, 10 ** 6), gen.randint(2, 10 ** 6)
        a = Fraction(gen.randint(0, den_a - 1), den_a)
        b = Fraction(gen.randint(1, den_b), den_b)
        lo, hi = min(a, b), max(a, b)
        if lo == hi:
            continue
        rep = verify_lebesgue_invariance(
            RationalInterval(lo, hi), (i % 20) + 1
        )
        ok = ok and rep.exact and rep.total == hi - lo
    for b in (2, 3, 5, 10):
        for i in range(1000):
            prefix = tuple(
                gen.randint(1, 8) for _ in range(gen.randint(1, 6))
            )
            rep = verify_shift_invariance(prefix, b, (i % 20) + 1)
            ok = ok and rep.exact
    elapsed = time.perf_counter() - t0
    report(3, ok, "1000 interval + 4x1000 cylinder invariance checks, "
                  "exact rational equality", elapsed, 10.0)


def test_criterion_4_codec_round_trips():
    gen = random.Random(1729)
    t0 = time.perf_counter()
    ok = True
    for _ in range(10 ** 4):
        den = gen.randint(2, 2000)
        x = Fraction(gen.randint(1, den), den)
        seq = encode_digits(x, 2)
        ok = ok and decode_exact(seq, 2) == x
    for _ in range(10 ** 4):
        prefix = tuple(gen.randint(1, 6)
                       for _ in range(gen.randint(0, 4)))
        cycle = tuple(gen.randint(1, 6)
                      for _ in range(gen.randint(1, 4)))
        seq = DigitSeq(prefix, cycle).canonical()
        x = decode_exact(seq, 3)
        ok = ok and encode_digits(x, 3) == seq
        partial, cyl = decode_prefix(seq, 3, len(seq.prefix))
        ok = ok and cyl.length == Fraction(1, 3 ** sum(seq.prefix))
    # shift property along one long orbit: the branch index sequence is
    # the digit sequence, one digit consumed per step
    x0 = Fraction(19, 37)
    digits = encode_digits(x0, 2).unroll(10 ** 4)
    x = x0
    for k in range(10 ** 4):
        i, x = apply_shift(x, 2)
        ok = ok and i == digits[k]
    elapsed = time.perf_counter() - t0
    report(4, ok, "10^4 base-2 + 10^4 base-3 round trips, cylinder "
                  "lengths, 10^4 shift steps", elapsed, 30.0)


def test_criterion_5_single_trajectory_band():
    m = digit_moments(2)
    sigma = math.exp(float(m.mean_log.mid))
    var = float(m.var_log.mid)
    t0 = time.perf_counter()
    stats = run_trajectory(2, 10 ** 6, trajectory_seed(42, 0))
    elapsed = time.perf_counter() - t0
    half_width = 5 * math.sqrt(var / 10 ** 6)
    lo, hi = sigma * math.exp(-half_width), sigma * math.exp(half_width)
    gm = stats.geometric_mean
    report(5, lo < gm < hi,
           f"10^6-step geometric mean {gm:.6f} inside 5-sigma band "
           f"({lo:.6f}, {hi:.6f})", elapsed, 5.0)


def test_criterion_6_ensemble_universality():
    t0 = time.perf_counter()
    ok = True
    details = []
    for b in (2, 3, 5):
        ens = run_ensemble(b, 100, 10 ** 5, 20240817)
        gof = chi_square_gof(ens.pooled_counts, b)
        ok = ok and not ens.degenerate and abs(ens.z_score) < 5 \
            and gof.p_value >= 1e-4
        details.append(f"b={b} z={ens.z_score:+.2f} p={gof.p_value:.3f}")
    elapsed = time.perf_counter() - t0
    report(6, ok, "100x10^5 ensembles: " + "; ".join(details),
           elapsed, 60.0)


def test_criterion_7_recurrence_consistency():
    t0 = time.perf_counter()
    steps = somos_recurrence(30)
    ok = True
    prev = 0.0
    for n in range(1, 31):
        partial = math.fsum(math.log(k) * 0.5 ** k for k in range(1, n + 1))
        ok = ok and abs(steps[n].root - math.exp(partial)) < 1e-12
        ok = ok and steps[n].root >= prev
        prev = steps[n].root
    sigma = float(somos().mid)
    ok = ok and prev < sigma and abs(prev - sigma) < 1e-8
    elapsed = time.perf_counter() - t0
    report(7, ok, "recurrence roots match partial sums to 1e-12 and "
                  "increase toward sigma", elapsed, 1.0)


def test_criterion_8_orbit_equivalence():
    t0 = time.perf_counter()
    orbit = lebesgue_orbit_experiment(10 ** 6, 1618)
    direct = run_trajectory(2, 10 ** 6, trajectory_seed(1618, 1))
    res = two_sample_chi_square(orbit.digit_counts, direct.digit_counts)
    elapsed = time.perf_counter() - t0
    report(8, res.p_value >= 1e-4,
           f"orbit vs sampler two-sample chi-square p={res.p_value:.4f}",
           elapsed, 10.0)
