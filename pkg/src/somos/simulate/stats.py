"""Goodness-of-fit tests for sampled digit histograms.

Bins are the digit values 1..11 plus one tail bin for digits >= 12,
with low-expectation bins merged into the tail from the top down so
every kept bin has a comfortable expected count.  P-values come from
the regularized upper incomplete gamma function evaluated in extended
precision, not from a float approximation of the chi-square CDF.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

__all__ = [
    "ChiSquareResult",
    "chi_square_gof",
    "two_sample_chi_square",
]

_MAX_SINGLE_BIN = 11   # digits above this always pool into the tail


def _chi2_sf(stat: float, df: int) -> float:
    """Upper tail P(X >= stat) for chi-square with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if stat <= 0:
        return 1.0
    with mp.workprec(80):
        return float(mp.gammainc(mp.mpf(df) / 2, mp.mpf(stat) / 2,
                                 mp.inf, regularized=True))


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    bins: tuple[dict, ...]

    def passed(self, alpha: float = 1e-4) -> bool:
        return self.p_value >= alpha

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "bins": list(self.bins),
        }


def _counts_vector(counts) -> np.ndarray:
    arr = np.asarray(counts, dtype=np.int64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValueError("counts must be a 1-d histogram indexed by digit")
    if (arr < 0).any():
        raise ValueError("counts must be non-negative")
    return arr


def _split_point(n: int, b: int, min_expected: float) -> int:
    """Largest k <= 11 so bins 1..k and the tail all have n*p >= threshold.

    Expected counts are n*(b-1)*b**-d per digit bin and n*b**-k for the
    tail; both shrink geometrically, so scanning k downward terminates.
    """
    k = _MAX_SINGLE_BIN
    while k > 1:
        p_k = Fraction(b - 1, b ** k)
        p_tail = Fraction(1, b ** k)
        if n * p_k >= min_expected and n * p_tail >= min_expected:
            return k
        k -= 1
    return k


def chi_square_gof(counts, b: int, *, min_expected: float = 10.0
                   ) -> ChiSquareResult:
    """Pearson test of a digit histogram against P(D=d) = (b-1) b**-d.

    `counts` is indexed by digit value; the final slot may hold pooled
    overflow counts (they land in the tail bin either way).
    """
    arr = _counts_vector(counts)
    n = int(arr.sum())
    if n == 0:
        raise ValueError("empty histogram")
    k = _split_point(n, b, min_expected)
    stat = 0.0
    bins = []
    for d in range(1, k + 1):
        obs = int(arr[d]) if d < arr.shape[0] else 0
        exp = n * (b - 1) / b ** d
        stat += (obs - exp) ** 2 / exp
        bins.append({"bin": str(d), "observed": obs, "expected": exp})
    obs_tail = int(arr[k + 1:].sum())
    exp_tail = n / b ** k
    stat += (obs_tail - exp_tail) ** 2 / exp_tail
    bins.append({"bin": f">={k + 1}", "observed": obs_tail,
                 "expected": exp_tail})
    df = k   # k+1 bins, one linear constraint (totals match)
    return ChiSquareResult(
        statistic=stat, df=df, p_value=_chi2_sf(stat, df), bins=tuple(bins)
    )


def two_sample_chi_square(counts_a, counts_b, *, min_expected: float = 10.0
                          ) -> ChiSquareResult:
    """Pearson homogeneity test: were two histograms drawn from one law?

    Model-free: expectations come from the pooled empirical proportions,
    so this cross-checks two samplers against each other without
    assuming either follows the geometric law.
    """
    a = _counts_vector(counts_a)
    c = _counts_vector(counts_b)
    width = max(a.shape[0], c.shape[0], _MAX_SINGLE_BIN + 2)
    a = np.pad(a, (0, width - a.shape[0]))
    c = np.pad(c, (0, width - c.shape[0]))
    n_a, n_b = int(a.sum()), int(c.sum())
    if n_a == 0 or n_b == 0:
        raise ValueError("empty histogram")
    n = n_a + n_b

    # digit bins 1..k then tail, k chosen so the smaller sample's pooled
    # expectation stays above the threshold in every kept bin
    n_small = min(n_a, n_b)
    pooled = a + c
    k = _MAX_SINGLE_BIN
    while k > 1:
        tail_pool = int(pooled[k + 1:].sum())
        bad = n_small * tail_pool < min_expected * n
        for d in range(1, k + 1):
            if n_small * int(pooled[d]) < min_expected * n:
                bad = True
                break
        if not bad:
            break
        k -= 1

    def binned(vec) -> list[int]:
        out = [int(vec[d]) if d < vec.shape[0] else 0 for d in range(1, k + 1)]
        out.append(int(vec[k + 1:].sum()))
        return out

    obs_a, obs_b, pool = binned(a), binned(c), binned(pooled)
    stat = 0.0
    bins = []
    kept = 0
    labels = [str(d) for d in range(1, k + 1)] + [f">={k + 1}"]
    for lbl, oa, ob, op in zip(labels, obs_a, obs_b, pool):
        if op == 0:
            continue   # bin empty in both samples: no information
        kept += 1
        ea = n_a * op / n
        eb = n_b * op / n
        stat += (oa - ea) ** 2 / ea + (ob - eb) ** 2 / eb
        bins.append({"bin": lbl, "observed_a": oa, "observed_b": ob,
                     "expected_a": ea, "expected_b": eb})
    df = kept - 1
    if df < 1:
        raise ValueError("need at least two non-empty bins")
    return ChiSquareResult(
        statistic=stat, df=df, p_value=_chi2_sf(stat, df), bins=tuple(bins)
    )
