"""Command-line front end: digit codec, constants, invariance checks,
Monte Carlo runs.

Exit codes are a stable contract: 0 success (and any verification
passed), 1 a verification or statistical check failed, 2 bad usage or
input.  Rational inputs are "p/q" strings and stay exact end to end;
decimal input is rejected rather than silently rounded.  Output is JSON
(the default) or, where a row shape makes sense, CSV with a fixed
documented column order.  --output writes to a file instead of stdout;
relative paths land in $SOMOS_OUTPUT_DIR when that is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from .digits import (
    DigitSeq,
    RationalInterval,
    decode_prefix,
    encode_digits,
    format_rational,
    parse_rational,
)
from .errors import SomosError, UnsupportedBaseError
from .measure import verify_lebesgue_invariance, verify_shift_invariance

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

OUTPUT_DIR_VAR = "SOMOS_OUTPUT_DIR"


class _UsageError(Exception):
    """Bad flag combination or malformed input value."""


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    path = output
    if not os.path.isabs(path):
        path = os.path.join(os.environ.get(OUTPUT_DIR_VAR, ""), path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")


def _emit_json(payload: dict, output: str | None) -> None:
    _emit(json.dumps(payload, indent=2), output)


def _emit_csv(header: list[str], rows: list[list], output: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(buf.getvalue(), output)


def _parse_digit_list(text: str, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(p.strip()) for p in text.split(","))
    except ValueError:
        raise _UsageError(f"{what} must be comma-separated integers: {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise _UsageError(f"{what} entries must be >= 1: {text!r}")
    return vals


def _ball_json(ball) -> dict:
    out = ball.to_json()
    out["decimal"] = ball.guaranteed_str()
    return out


# ---------------------------------------------------------------- expand


def _truncate_display(seq: DigitSeq, k: int) -> DigitSeq:
    """Digits whose cumulative sum stays within k base-b places.

    When the cut lands inside the repeating cycle the remainder is a
    rotation of it, so the result is still exact; when it lands inside
    the prefix the cycle is dropped and the result is just the shown
    digits.
    """
    shown = []
    total = 0
    for d in seq.unroll(k):    # cumulative sum grows by >= 1 per digit
        if total + d > k:
            break
        shown.append(d)
        total += d
    j = len(shown)
    if j >= len(seq.prefix) and seq.cycle:
        r = (j - len(seq.prefix)) % len(seq.cycle)
        return DigitSeq(tuple(shown), seq.cycle[r:] + seq.cycle[:r])
    return DigitSeq(tuple(shown), ())


def cmd_expand(args) -> int:
    if args.format != "json":
        raise _UsageError("expand supports --format json only")
    x = parse_rational(args.x)
    seq = encode_digits(x, args.base)
    if args.digits is not None:
        if args.digits < 1:
            raise _UsageError("--digits must be >= 1")
        display = _truncate_display(seq, args.digits)
    else:
        display = seq
    k = len(display.prefix)
    partial, cyl = decode_prefix(seq, args.base, k)
    payload = {
        "input": format_rational(x),
        "b": args.base,
        "text": str(display),
        "canonical": str(seq),
        "prefix": list(display.prefix),
        "cycle": list(display.cycle),
        "partial_sum": format_rational(partial),
        "cylinder": cyl.to_json(),
    }
    if args.digits is not None:
        payload["digits_budget"] = args.digits
    _emit_json(payload, args.output)
    return EXIT_OK


# -------------------------------------------------------------- constant


def _constant_entries(args) -> tuple[list[dict], list]:
    from . import constants

    name = args.name
    precision = args.precision
    if name == "khinchin":
        if args.base is not None:
            raise _UsageError("khinchin takes no --base")
        if args.z is not None:
            raise _UsageError("--z applies to gamma only")
        ball = constants.khinchin(precision)
        return [{"name": "khinchin", "value": _ball_json(ball)}], [ball]

    if name == "gamma":
        if args.z is None:
            raise _UsageError("gamma requires --z p/q in (0, 1/2]")
        if args.base is not None:
            raise _UsageError("gamma takes --z, not --base")
        z = parse_rational(args.z)
        ball = constants.gamma_euler(z, precision)
        return [{"name": "gamma", "z": format_rational(z),
                 "value": _ball_json(ball)}], [ball]

    if args.z is not None:
        raise _UsageError("--z applies to gamma only")
    b = 2 if args.base is None else args.base
    if name == "somos":
        if b != 2:
            raise _UsageError("somos is the base-2 constant; use somos_b")
        name = "somos_b"

    if args.sh_variant:
        if args.route != "series":
            raise _UsageError("--sh-variant has no gamma route")
        ball = constants.somos_b_root_variant(b, precision)
        return [{"name": "somos_b", "b": b, "variant": "root",
                 "value": _ball_json(ball)}], [ball]

    entries = []
    balls = []
    if args.route in ("series", "both"):
        ball = constants.somos_b(b, precision)
        balls.append(ball)
        entries.append({"name": "somos_b", "b": b, "route": "series",
                        "value": _ball_json(ball)})
    if args.route in ("gamma", "both"):
        ball = constants.somos_b_via_gamma(b, precision)
        balls.append(ball)
        entries.append({"name": "somos_b", "b": b, "route": "gamma",
                        "value": _ball_json(ball)})
    return entries, balls


def cmd_constant(args) -> int:
    entries, balls = _constant_entries(args)
    overlap = balls[0].overlaps(balls[1]) if len(balls) == 2 else None
    if args.format == "csv":
        header = ["name", "b", "z", "route", "mid", "rad", "decimal"]
        rows = []
        for e in entries:
            v = e["value"]
            rows.append([
                e["name"], e.get("b", ""), e.get("z", ""),
                e.get("route", e.get("variant", "")),
                v["mid"], v["rad"], v["decimal"],
            ])
        _emit_csv(header, rows, args.output)
    else:
        payload = {"results": entries}
        if overlap is not None:
            payload["overlap"] = overlap
        _emit_json(payload, args.output)
    if overlap is False:
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    if args.format != "json":
        raise _UsageError("verify supports --format json only")
    if args.branches < 1:
        raise _UsageError("-N must be >= 1")
    if args.kind == "lebesgue":
        if args.interval is None:
            raise _UsageError("verify lebesgue requires --interval p/q,r/s")
        if args.prefix is not None:
            raise _UsageError("--prefix applies to verify shift")
        parts = args.interval.split(",")
        if len(parts) != 2:
            raise _UsageError("--interval must be two rationals: p/q,r/s")
        lo, hi = (parse_rational(p) for p in parts)
        if not 0 <= lo < hi <= 1:
            raise _UsageError(
                f"need 0 <= lower < upper <= 1, got {args.interval!r}"
            )
        b = 2 if args.base is None else args.base
        if b != 2:
            raise UnsupportedBaseError(
                "lebesgue invariance is a base-2 statement"
            )
        report = verify_lebesgue_invariance(
            RationalInterval(lo, hi), args.branches, b
        )
    else:
        if args.prefix is None:
            raise _UsageError("verify shift requires --prefix m1,m2,...")
        if args.interval is not None:
            raise _UsageError("--interval applies to verify lebesgue")
        prefix = _parse_digit_list(args.prefix, "--prefix")
        b = 2 if args.base is None else args.base
        report = verify_shift_invariance(prefix, b, args.branches)
    _emit_json(report.to_json(), args.output)
    return EXIT_OK if report.exact else EXIT_FAIL


# -------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    from .constants import digit_moments
    from .rng import trajectory_seed
    from .simulate import chi_square_gof, run_ensemble, run_trajectory

    if args.steps < 1:
        raise _UsageError("--steps must be >= 1")
    if args.trajectories < 1:
        raise _UsageError("--trajectories must be >= 1")
    checkpoints = None
    if args.checkpoints is not None:
        checkpoints = sorted(_parse_digit_list(args.checkpoints, "--checkpoints"))
        if checkpoints[-1] > args.steps:
            raise _UsageError("--checkpoints cannot exceed --steps")

    b = 2 if args.base is None else args.base
    moments = digit_moments(b)
    expected_log = float(moments.mean_log.mid)

    lead = run_trajectory(
        b, args.steps, trajectory_seed(args.seed, 0), checkpoints=checkpoints
    )
    convergence = [
        {
            "step": step,
            "geometric_mean": gm,
            "log_error": math.log(gm) - expected_log,
        }
        for step, gm in lead.checkpoints
    ]

    if args.trajectories == 1:
        sd = math.sqrt(float(moments.var_log.mid))
        z = (lead.mean_log - expected_log) / (sd / math.sqrt(args.steps))
        summary = {
            "kind": "trajectory",
            "z_score": z,
            "expected_log": expected_log,
            "trajectory": lead.to_json(),
        }
        counts = lead.digit_counts
        failed = not abs(z) < 5
    else:
        ens = run_ensemble(b, args.trajectories, args.steps, args.seed)
        summary = {"kind": "ensemble", "ensemble": ens.to_json()}
        z = ens.z_score
        counts = ens.pooled_counts
        failed = ens.degenerate or not abs(z) < 5

    gof = chi_square_gof(counts, b)
    summary["digit_gof"] = gof.to_json()

    if args.format == "csv":
        _emit_csv(
            ["step", "geometric_mean", "log_error"],
            [[c["step"], c["geometric_mean"], c["log_error"]]
             for c in convergence],
            args.output,
        )
    else:
        payload = {
            "b": b,
            "steps": args.steps,
            "trajectories": args.trajectories,
            "seed": args.seed,
            "convergence": convergence,
            "summary": summary,
        }
        _emit_json(payload, args.output)
    return EXIT_FAIL if failed else EXIT_OK


# ------------------------------------------------------------ arg parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # argparse default already exits 2; keep it
        super().error(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="somos", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, fmt=("json",)):
        sp.add_argument("--format", choices=fmt, default="json",
                        help="output format (default json)")
        sp.add_argument("--output", metavar="FILE", default=None,
                        help=f"write to FILE instead of stdout; relative "
                             f"paths resolve under ${OUTPUT_DIR_VAR}")

    sp = sub.add_parser("expand", help="run-length digit expansion of p/q")
    sp.add_argument("x", help='rational in (0, 1], as "p/q"')
    sp.add_argument("--base", "-b", type=int, default=2)
    sp.add_argument("--digits", "-k", type=int, default=None,
                    help="show digits within this many base-b places")
    common(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("constant", help="rigorous constant enclosures")
    sp.add_argument("name", choices=["somos", "somos_b", "khinchin", "gamma"])
    sp.add_argument("--base", "-b", type=int, default=None)
    sp.add_argument("--precision", type=float, default=None,
                    help="target radius (default 1e-10; khinchin 1e-6)")
    sp.add_argument("--route", choices=["series", "gamma", "both"],
                    default="series")
    sp.add_argument("--sh-variant", action="store_true",
                    help="emit the root normalization sigma_b^(1/(b-1))")
    sp.add_argument("--z", default=None, help='gamma argument, "p/q"')
    common(sp, fmt=("json", "csv"))
    sp.set_defaults(func=cmd_constant)

    sp = sub.add_parser("verify", help="exact measure-invariance reports")
    sp.add_argument("kind", choices=["lebesgue", "shift"])
    sp.add_argument("--interval", default=None,
                    help='half-open interval "p/q,r/s" (lebesgue)')
    sp.add_argument("--prefix", default=None,
                    help='cylinder digits "m1,m2,..." (shift)')
    sp.add_argument("--base", "-b", type=int, default=None)
    sp.add_argument("-N", "--branches", type=int, default=8,
                    help="branches to enumerate before the exact tail")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="Monte Carlo digit trajectories")
    sp.add_argument("--base", "-b", type=int, default=None)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--trajectories", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--checkpoints", default=None,
                    help='record convergence at these steps, "s1,s2,..."')
    common(sp, fmt=("json", "csv"))
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SomosError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
