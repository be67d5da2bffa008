"""Trajectory statistics for digit streams and binary orbits.

All accumulation is exact integer arithmetic on fixed-point log values,
so a trajectory's statistics are a pure function of (seed, base, steps):
identical across backends, batch sizes, and checkpoint layouts.  Floats
appear only at the edge, when a geometric mean is reported.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..constants import digit_moments
from ..errors import UnsupportedBaseError
from ..rng import BITSTREAM_TAG, trajectory_seed
from .sampling import (
    LOG_SCALE_BITS,
    quantize_log,
    sample_digit_batch,
    tables_for,
)

__all__ = [
    "TrajectoryStats",
    "EnsembleSummary",
    "run_trajectory",
    "run_ensemble",
    "lebesgue_orbit_experiment",
]

GENERATOR_NAME = "philox4x64-10"
SEED_DERIVATION = "mix64(base_seed XOR trajectory_index)"

_SQ_SCALE_BITS = 2 * LOG_SCALE_BITS


@dataclass(frozen=True)
class TrajectoryStats:
    """Exact accumulated statistics of one digit trajectory."""

    b: int
    steps: int
    seed: int
    sum_log_fix: int        # sum of log(d) in units of 2**-48, exact int
    sum_log_sq_fix: int     # sum of log(d)**2 in units of 2**-96, exact int
    digit_counts: tuple[int, ...]   # index d; last slot = digits > tmax
    checkpoints: tuple[tuple[int, float], ...]  # (step, geometric mean)
    generator: str = GENERATOR_NAME

    @property
    def sum_log(self) -> float:
        return float(self.sum_log_fix) / (1 << LOG_SCALE_BITS)

    @property
    def mean_log(self) -> float:
        return float(self.sum_log_fix) / (1 << LOG_SCALE_BITS) / self.steps

    @property
    def geometric_mean(self) -> float:
        return math.exp(self.mean_log)

    @property
    def var_log(self) -> float:
        """Population variance of the observed log digits."""
        m2 = float(self.sum_log_sq_fix) / (1 << _SQ_SCALE_BITS) / self.steps
        return m2 - self.mean_log ** 2

    @property
    def second_moment_consistent(self) -> bool:
        """Cauchy-Schwarz on the exact integers: k*sum(x^2) >= sum(x)^2."""
        return self.steps * self.sum_log_sq_fix >= self.sum_log_fix ** 2

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "steps": self.steps,
            "seed": self.seed,
            "generator": self.generator,
            "geometric_mean": self.geometric_mean,
            "mean_log": self.mean_log,
            "var_log": self.var_log,
            "sum_log_fix": str(self.sum_log_fix),
            "sum_log_sq_fix": str(self.sum_log_sq_fix),
            "log_scale_bits": LOG_SCALE_BITS,
            "digit_counts": {
                str(d): c for d, c in enumerate(self.digit_counts) if c
            },
            "checkpoints": [
                {"step": s, "geometric_mean": g} for s, g in self.checkpoints
            ],
        }


class _Accumulator:
    """Exact running sums over digit batches (kernel + rare-digit patch)."""

    def __init__(self, tables, impl):
        self.tables = tables
        self.impl = impl
        self.counts = np.zeros(tables.tmax + 2, dtype=np.int64)
        self.sum_fix = 0
        self.sq_fix = 0
        self.steps = 0

    def add(self, digits: np.ndarray) -> None:
        tbl = self.tables
        counts, s_fix, q_fix = self.impl.digit_stats(digits, tbl.l48, tbl.tmax)
        self.counts += counts
        self.sum_fix += s_fix
        self.sq_fix += q_fix
        self.steps += digits.shape[0]
        if counts[tbl.tmax + 1]:
            # kernel counted over-table digits but skipped their logs
            for d in digits[digits > tbl.tmax]:
                lv = quantize_log(int(d))
                self.sum_fix += lv
                self.sq_fix += lv * lv

    def geometric_mean(self) -> float:
        mean_fix = float(self.sum_fix) / (1 << LOG_SCALE_BITS)
        return math.exp(mean_fix / self.steps)


def _checkpoint_plan(steps: int, checkpoints) -> list[int]:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if checkpoints is None:
        plan = []
        c = 10
        while c < steps:
            plan.append(c)
            c *= 10
        plan.append(steps)
        return plan
    plan = sorted(set(int(c) for c in checkpoints))
    if plan and (plan[0] < 1 or plan[-1] > steps):
        raise ValueError("checkpoints must lie in [1, steps]")
    if not plan or plan[-1] != steps:
        plan.append(steps)
    return plan


def run_trajectory(b: int, steps: int, seed: int, *,
                   checkpoints=None, impl=None) -> TrajectoryStats:
    """Exact statistics of digits 0..steps-1 of stream (seed, b)."""
    if impl is None:
        impl = _kernels.impl
    plan = _checkpoint_plan(steps, checkpoints)
    acc = _Accumulator(tables_for(b), impl)
    recorded = []
    pos = 0
    for cp in plan:
        while pos < cp:
            n = min(impl.MAX_BATCH, cp - pos)
            acc.add(sample_digit_batch(b, seed, pos, n, impl=impl))
            pos += n
        recorded.append((cp, acc.geometric_mean()))
    return TrajectoryStats(
        b=b,
        steps=steps,
        seed=int(seed),
        sum_log_fix=acc.sum_fix,
        sum_log_sq_fix=acc.sq_fix,
        digit_counts=tuple(int(c) for c in acc.counts),
        checkpoints=tuple(recorded),
    )


@dataclass(frozen=True)
class EnsembleSummary:
    """Mean-of-trajectory-means test against the exact expected log."""

    b: int
    trajectories: int
    steps: int
    base_seed: int
    mean_log: float                 # average of per-trajectory mean logs
    std_error: float                # sample SE of that average
    expected_log: float             # midpoint of the exact ball
    z_score: float | None           # None when the ensemble is degenerate
    degenerate: bool
    trajectory_means: tuple[float, ...]
    pooled_counts: tuple[int, ...]
    generator: str = GENERATOR_NAME
    seed_derivation: str = SEED_DERIVATION

    @property
    def geometric_mean(self) -> float:
        return math.exp(self.mean_log)

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "trajectories": self.trajectories,
            "steps": self.steps,
            "base_seed": self.base_seed,
            "generator": self.generator,
            "seed_derivation": self.seed_derivation,
            "mean_log": self.mean_log,
            "geometric_mean": self.geometric_mean,
            "std_error": self.std_error,
            "expected_log": self.expected_log,
            "z_score": self.z_score,
            "degenerate": self.degenerate,
            "pooled_counts": {
                str(d): c for d, c in enumerate(self.pooled_counts) if c
            },
        }


def run_ensemble(b: int, trajectories: int, steps: int, base_seed: int, *,
                 impl=None, seeds=None) -> EnsembleSummary:
    """Independent trajectories with derived seeds, tested against theory.

    `seeds` overrides the per-trajectory seed derivation (used by tests
    to force degenerate ensembles); normally leave it None.
    """
    if trajectories < 1:
        raise ValueError("trajectories must be >= 1")
    if seeds is None:
        seeds = [trajectory_seed(base_seed, t) for t in range(trajectories)]
    elif len(seeds) != trajectories:
        raise ValueError("seeds must have one entry per trajectory")
    tbl = tables_for(b)
    pooled = np.zeros(tbl.tmax + 2, dtype=np.int64)
    means = []
    for s in seeds:
        stats = run_trajectory(b, steps, s, checkpoints=[steps], impl=impl)
        means.append(stats.mean_log)
        pooled += np.asarray(stats.digit_counts, dtype=np.int64)

    mean = math.fsum(means) / trajectories
    if trajectories > 1:
        var_s = statistics.variance(means, xbar=mean)
        se = math.sqrt(var_s / trajectories)
    else:
        se = 0.0
    expected = float(digit_moments(b).mean_log.mid)
    degenerate = se == 0.0
    z = None if degenerate else (mean - expected) / se
    return EnsembleSummary(
        b=b,
        trajectories=trajectories,
        steps=steps,
        base_seed=int(base_seed),
        mean_log=mean,
        std_error=se,
        expected_log=expected,
        z_score=z,
        degenerate=degenerate,
        trajectory_means=tuple(means),
        pooled_counts=tuple(int(c) for c in pooled),
    )


def lebesgue_orbit_experiment(steps: int, seed: int, *, b: int = 2,
                              checkpoints=None, impl=None) -> TrajectoryStats:
    """Digit statistics along the orbit of one random binary point.

    Draws a single uniform point as an endless bit stream and reads its
    base-2 run-length digits in order: the digit sequence of a Lebesgue-
    random point, against which the direct geometric sampler can be
    cross-checked.  Only base 2 has full support, so other bases are
    rejected rather than silently conditioned on representability.
    """
    if b != 2:
        raise UnsupportedBaseError(
            "orbit experiment requires base 2 (representable set has "
            f"measure zero in base {b})"
        )
    if impl is None:
        impl = _kernels.impl
    plan = _checkpoint_plan(steps, checkpoints)
    acc = _Accumulator(tables_for(b), impl)
    recorded = []
    plan_iter = iter(plan)
    next_cp = next(plan_iter)
    block = 0
    carry = 0
    nblocks = 4096      # 16384 words -> about half a million digits
    pending = None
    done = False
    while not done:
        words = impl.stream_blocks(seed, block, nblocks, BITSTREAM_TAG)
        block += nblocks
        digits, carry = impl.bitstream_digits(words, carry)
        take = min(digits.shape[0], steps - acc.steps)
        digits = digits[:take]
        consumed = 0
        while consumed < digits.shape[0]:
            room = next_cp - acc.steps
            chunk = digits[consumed:consumed + room]
            acc.add(chunk)
            consumed += chunk.shape[0]
            if acc.steps == next_cp:
                recorded.append((next_cp, acc.geometric_mean()))
                if next_cp == steps:
                    done = True
                    break
                next_cp = next(plan_iter)
    return TrajectoryStats(
        b=b,
        steps=steps,
        seed=int(seed),
        sum_log_fix=acc.sum_fix,
        sum_log_sq_fix=acc.sq_fix,
        digit_counts=tuple(int(c) for c in acc.counts),
        checkpoints=tuple(recorded),
    )
