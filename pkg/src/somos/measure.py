"""Exact invariance checks for the measures behind the digit shift.

Two measures matter here.  For b = 2 the shift preserves Lebesgue measure
on (0, 1].  For general b the natural invariant measure gives the cylinder
over a digit prefix (m_1, ..., m_k) mass prod_j (b-1) * b^-m_j, i.e. the
digits are i.i.d. geometric with P(digit = i) = (b-1) * b^-i.

Invariance is verified without floats: the preimage of a set under the
shift is the disjoint union of its branch preimages, so summing the first
N branch masses exactly and adding the closed-form tail must reproduce
the original mass, as an identity of rationals.  The reports keep every
branch term so a failure would be attributable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .digits import RationalInterval, apply_shift, format_rational
from .errors import UnsupportedBaseError

__all__ = [
    "InvarianceReport",
    "Observable",
    "branch_preimage",
    "cylinder_measure",
    "verify_lebesgue_invariance",
    "verify_shift_invariance",
    "birkhoff_average",
]


def branch_preimage(iv: RationalInterval, i: int, b: int = 2) -> RationalInterval:
    """Preimage of an interval under branch i of the shift.

    Branch i maps ((b-1)/b^i, b/b^i] onto (0, 1] by x -> b^i x - (b-1),
    so the preimage of (lo, hi] is ((lo + b-1)/b^i, (hi + b-1)/b^i].
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if i < 1:
        raise ValueError(f"branch index must be >= 1, got {i}")
    scale = Fraction(1, b ** i)
    return RationalInterval((iv.lower + b - 1) * scale, (iv.upper + b - 1) * scale)


def cylinder_measure(digits: Sequence[int], b: int = 2) -> Fraction:
    """Invariant mass of the cylinder over a digit prefix.

    Digits are i.i.d. geometric under the invariant measure, so the
    cylinder over (m_1, ..., m_k) has mass prod_j (b-1) * b^-m_j.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    total = Fraction(1)
    for m in digits:
        if m < 1:
            raise ValueError(f"digits must be >= 1, got {m}")
        total *= Fraction(b - 1, b ** m)
    return total


@dataclass(frozen=True)
class InvarianceReport:
    """Exact accounting of one invariance check.

    branch_measures holds the first truncation_index branch masses; tail
    is the closed-form mass of all remaining branches.  exact is True iff
    branch sum plus tail reproduces the original mass as rationals.
    """

    kind: str
    b: int
    original: Fraction
    branch_measures: tuple[tuple[int, Fraction], ...]
    truncation_index: int
    tail: Fraction
    total: Fraction = field(init=False)
    exact: bool = field(init=False)

    def __post_init__(self) -> None:
        total = sum((m for _, m in self.branch_measures), Fraction(0)) + self.tail
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "exact", total == self.original)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "b": self.b,
            "original": format_rational(self.original),
            "branches": [[i, format_rational(m)] for i, m in self.branch_measures],
            "truncation_index": self.truncation_index,
            "tail": format_rational(self.tail),
            "total": format_rational(self.total),
            "exact": self.exact,
        }


def verify_lebesgue_invariance(iv: RationalInterval, n_branches: int,
                               b: int = 2) -> InvarianceReport:
    """Check that the base-2 shift preserves Lebesgue measure on iv.

    Each branch preimage is measured by its own endpoints (not by the
    |iv|/2^i shortcut, which is what is being verified); branches past
    n_branches contribute the geometric tail |iv| * 2^-n exactly.
    """
    if b != 2:
        raise UnsupportedBaseError(
            f"Lebesgue measure is shift-invariant only for b = 2, got b = {b}"
        )
    if n_branches < 1:
        raise ValueError("need at least one branch")
    if not (0 <= iv.lower and iv.upper <= 1):
        raise ValueError(f"interval {iv} is not inside (0, 1]")
    branches = []
    for i in range(1, n_branches + 1):
        pre = branch_preimage(iv, i, 2)
        branches.append((i, pre.length))
    tail = iv.length * Fraction(1, 2 ** n_branches)
    return InvarianceReport(
        kind="lebesgue",
        b=2,
        original=iv.length,
        branch_measures=tuple(branches),
        truncation_index=n_branches,
        tail=tail,
    )


def verify_shift_invariance(prefix: Sequence[int], b: int,
                            n_branches: int) -> InvarianceReport:
    """Check shift invariance of the geometric digit measure on a cylinder.

    The preimage of the cylinder over (m_1, ..., m_k) is the disjoint
    union over i of cylinders over (i, m_1, ..., m_k); each is measured
    independently through cylinder_measure, and the branches past
    n_branches contribute b^-n times the original mass exactly.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if n_branches < 1:
        raise ValueError("need at least one branch")
    original = cylinder_measure(prefix, b)
    branches = []
    for i in range(1, n_branches + 1):
        branches.append((i, cylinder_measure((i, *prefix), b)))
    tail = original * Fraction(1, b ** n_branches)
    return InvarianceReport(
        kind="shift",
        b=b,
        original=original,
        branch_measures=tuple(branches),
        truncation_index=n_branches,
        tail=tail,
    )


class Observable:
    """The log-digit observable f(x) = log(first digit of x).

    Its Birkhoff averages converge to log of the base-b constant for
    almost every x under the invariant measure, which is what the
    simulation module samples.
    """

    def __init__(self, b: int = 2) -> None:
        if b < 2:
            raise ValueError(f"base must be >= 2, got {b}")
        self.b = b

    def on_digit(self, i: int) -> float:
        if i < 1:
            raise ValueError(f"digits must be >= 1, got {i}")
        return math.log(i)

    def __call__(self, x) -> float:
        i, _ = apply_shift(x, self.b)
        return self.on_digit(i)


def birkhoff_average(digits: Sequence[int], k: int | None = None) -> float:
    """Average of log(digit) over the first k digits, compensated.

    math.fsum keeps the sum exactly rounded, so the result does not
    depend on how the digit list was chunked upstream.
    """
    if k is None:
        k = len(digits)
    if not 0 < k <= len(digits):
        raise ValueError(f"k must be in 1..{len(digits)}, got {k}")
    return math.fsum(math.log(d) for d in digits[:k]) / k
