"""Exact run-length digit expansions of reals in (0, 1].

A real x in (0, 1] is written as

    x = (b-1) * sum_k b^-(n_1 + n_2 + ... + n_k),      n_k >= 1,

so the digit n_k is the gap between consecutive occurrences of the digit
b-1 in the ordinary base-b expansion of x, taken in its non-terminating
form.  For b = 2 every x in (0, 1] has exactly one such expansion; for
b >= 3 only reals whose base-b expansion uses the digits 0 and b-1
exclusively are representable (a Cantor-like set), and everything else
raises NotRepresentableError.

Rationals have eventually periodic digit sequences, stored exactly as a
DigitSeq (finite prefix plus repeating cycle) and rendered in the text
form "[n1,n2,...;c1,c2,...]".  All arithmetic in this module is exact,
via fractions.Fraction and Python integers.

The one-step shift sends x to b^i * x - (b - 1), where i is the unique
branch with (b-1)/b^i < x <= b/b^i; it deletes the leading digit of the
expansion.  For b >= 3 the branch intervals leave gaps, and gap points
raise GapPointError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    GapPointError,
    NotRepresentableError,
    OutOfRangeError,
    ResourceLimitError,
)

Rational = Fraction

__all__ = [
    "Rational",
    "RationalInterval",
    "DigitSeq",
    "parse_rational",
    "format_rational",
    "encode_digits",
    "decode_exact",
    "decode_prefix",
    "apply_shift",
    "orbit_digits",
    "digits_from_bitstream",
]


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (or a bare integer) into an exact Fraction.

    Decimal and scientific forms are rejected on purpose: every interface
    of this package is exact, and "0.1" silently means 3602879701896397/2**55
    to a float-minded caller.
    """
    s = text.strip()
    if any(c in s for c in ".eE"):
        raise ValueError(f"expected exact rational 'p/q', got {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"expected exact rational 'p/q', got {text!r}") from exc


def format_rational(x: Fraction) -> str:
    """Render a Fraction as "p/q" with the denominator always explicit."""
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RationalInterval:
    """Half-open interval (lower, upper] with exact rational endpoints."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        if not self.lower < self.upper:
            raise ValueError(f"empty interval ({self.lower}, {self.upper}]")

    @property
    def length(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lower < x <= self.upper

    def __str__(self) -> str:
        return f"({self.lower}, {self.upper}]"

    def to_json(self) -> dict:
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
        }


@dataclass(frozen=True)
class DigitSeq:
    """Eventually periodic digit sequence: finite prefix, repeating cycle.

    An empty cycle means the sequence is just the finite prefix (useful for
    truncated displays); an empty prefix with cycle (2,) is the purely
    periodic expansion of 1/3.  Every entry is an integer >= 1.

    Two DigitSeq objects are equal iff prefix and cycle match literally;
    use canonical() to compare the sequences they denote.
    """

    prefix: tuple[int, ...] = ()
    cycle: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(n) for n in self.prefix))
        object.__setattr__(self, "cycle", tuple(int(n) for n in self.cycle))
        for n in self.prefix + self.cycle:
            if n < 1:
                raise ValueError(f"digits must be >= 1, got {n}")

    def canonical(self) -> "DigitSeq":
        """Unique normal form: primitive cycle, shortest possible prefix."""
        prefix = list(self.prefix)
        cycle = list(self.cycle)
        if cycle:
            m = len(cycle)
            for d in range(1, m + 1):
                if m % d == 0 and cycle == cycle[:d] * (m // d):
                    cycle = cycle[:d]
                    break
            while prefix and prefix[-1] == cycle[-1]:
                prefix.pop()
                cycle = [cycle[-1]] + cycle[:-1]
        return DigitSeq(tuple(prefix), tuple(cycle))

    def unroll(self, k: int) -> tuple[int, ...]:
        """First k digits of the sequence."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k <= len(self.prefix):
            return self.prefix[:k]
        if not self.cycle:
            raise ValueError(f"sequence has only {len(self.prefix)} digits")
        need = k - len(self.prefix)
        reps = -(-need // len(self.cycle))
        return self.prefix + (self.cycle * reps)[:need]

    def __str__(self) -> str:
        head = ",".join(str(n) for n in self.prefix)
        if not self.cycle:
            return f"[{head}]"
        tail = ",".join(str(n) for n in self.cycle)
        return f"[{head};{tail}]"

    @classmethod
    def parse(cls, text: str) -> "DigitSeq":
        s = text.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise ValueError(f"malformed digit sequence {text!r}")
        body = s[1:-1]
        if ";" in body:
            head, _, tail = body.partition(";")
        else:
            head, tail = body, ""
        def ints(part: str) -> tuple[int, ...]:
            part = part.strip()
            if not part:
                return ()
            return tuple(int(tok) for tok in part.split(","))
        return cls(ints(head), ints(tail))


def _canonical_from_ones(ones_prefix: Sequence[int], ones_cycle: Sequence[int],
                         period: int) -> DigitSeq:
    """Run-length digits from occurrence positions of the digit b-1.

    ones_prefix are the positions before the expansion's periodic part,
    ones_cycle the positions inside one period of length `period`.
    """
    c = list(ones_cycle)
    first = list(ones_prefix) + [c[0]]
    prefix = [first[0]] + [first[j] - first[j - 1] for j in range(1, len(first))]
    cycle = [c[j] - c[j - 1] for j in range(1, len(c))] + [c[0] + period - c[-1]]
    return DigitSeq(tuple(prefix), tuple(cycle)).canonical()


def encode_digits(x, b: int = 2, *, max_digits: int = 10 ** 6) -> DigitSeq:
    """Exact run-length digit expansion of a rational x in (0, 1].

    Uses the non-terminating base-b expansion (digit at step t is
    ceil(b*r) - 1 for remainder r in (0, 1]), so x = 1/2 in base 2 is
    0.0111... and encodes as [2;1], never as 0.1.  The remainder state is
    tracked exactly; when it repeats, the expansion is periodic and the
    prefix/cycle split is read off the positions of the digit b-1.

    Raises NotRepresentableError for b >= 3 when an expansion digit other
    than 0 or b-1 appears, and ResourceLimitError past max_digits.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    x = Fraction(x)
    if not 0 < x <= 1:
        raise OutOfRangeError(f"{x} is outside (0, 1]")
    q = x.denominator
    r = x.numerator
    seen: dict[int, int] = {}
    ones: list[int] = []
    t = 1
    while r not in seen:
        seen[r] = t
        d = (b * r - 1) // q
        r = b * r - d * q
        if d == b - 1:
            ones.append(t)
        elif d != 0:
            raise NotRepresentableError(
                f"base-{b} expansion of {x} has digit {d} at place {t}; "
                f"only 0 and {b - 1} are representable"
            )
        t += 1
        if t > max_digits:
            raise ResourceLimitError(
                f"no period within {max_digits} expansion places"
            )
    t0, t1 = seen[r], t
    cyc = [s for s in ones if s >= t0]
    # A remainder in (0, 1] always has digit mass ahead of it, so the
    # periodic part cannot be all zeros.
    assert cyc, "all-zero period is impossible for r > 0"
    pre = [s for s in ones if s < t0]
    return _canonical_from_ones(pre, cyc, t1 - t0)


def decode_exact(d: DigitSeq, b: int = 2) -> Fraction:
    """Exact value of an eventually periodic digit sequence.

    The prefix contributes a finite sum, the cycle a geometric one:
    with S the prefix digit total and C the cycle digit total,

        x = (b-1) * [ sum_j b^-s_j  +  b^-S * (sum_t b^-c_t) / (1 - b^-C) ]

    over prefix partial sums s_j and cycle partial sums c_t.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if not d.cycle:
        raise ValueError("an exact value needs a repeating cycle")
    s = 0
    total = Fraction(0)
    for n in d.prefix:
        s += n
        total += Fraction(1, b ** s)
    c = 0
    cyc = Fraction(0)
    for n in d.cycle:
        c += n
        cyc += Fraction(1, b ** c)
    total += Fraction(1, b ** s) * cyc / (1 - Fraction(1, b ** c))
    return (b - 1) * total


def decode_prefix(d: DigitSeq, b: int = 2, k: int | None = None
                  ) -> tuple[Fraction, RationalInterval]:
    """Partial sum of the first k digits and the cylinder they pin down.

    Every extension of the digit prefix (n_1, ..., n_k) lands in the
    half-open cylinder (partial, partial + b^-(n_1+...+n_k)], so the
    returned interval is the exact set of reals with that prefix.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if k is None:
        k = len(d.prefix)
    digits = d.unroll(k)
    s = 0
    partial = Fraction(0)
    for n in digits:
        s += n
        partial += Fraction(1, b ** s)
    partial *= b - 1
    return partial, RationalInterval(partial, partial + Fraction(1, b ** s))


def apply_shift(x, b: int = 2) -> tuple[int, Fraction]:
    """One step of the digit shift: (first digit i, b^i * x - (b-1)).

    The branch index i is the unique i >= 1 with (b-1)/b^i < x <= b/b^i.
    Deletes the first run-length digit: the image's expansion is the
    input's with digit n_1 removed.  For b >= 3 the branch intervals do
    not tile (0, 1]; a point in a gap raises GapPointError.
    """
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    x = Fraction(x)
    if not 0 < x <= 1:
        raise OutOfRangeError(f"{x} is outside (0, 1]")
    p, q = x.numerator, x.denominator
    i = 1
    pb = p * b
    lim = (b - 1) * q
    while pb <= lim:
        pb *= b
        i += 1
    # now x > (b-1)/b^i; branch membership also needs x <= b^(1-i)
    if pb > b * q:
        raise GapPointError(
            f"{x} lies between branch {i} and branch {i - 1} in base {b}"
        )
    return i, Fraction(pb - lim, q)


def orbit_digits(x, b: int = 2, k: int = 1) -> tuple[int, ...]:
    """First k digits of x read off by iterating the shift map."""
    if k < 0:
        raise ValueError("k must be >= 0")
    digits = []
    y = Fraction(x)
    for _ in range(k):
        i, y = apply_shift(y, b)
        digits.append(i)
    return tuple(digits)


def digits_from_bitstream(bits: Iterable[int]) -> tuple[int, ...]:
    """Run-length digits of a finite 0/1 stream read as binary places.

    Digits are the gaps between successive 1 bits (positions count from 1);
    trailing 0 bits after the last 1 belong to an unfinished run and are
    dropped.  This is the base-2 reference parse used to cross-check the
    vectorized kernels.
    """
    digits = []
    last = 0
    pos = 0
    for bit in bits:
        pos += 1
        if bit == 1:
            digits.append(pos - last)
            last = pos
        elif bit != 0:
            raise ValueError(f"bit stream entry {bit!r} is not 0 or 1")
    return tuple(digits)
