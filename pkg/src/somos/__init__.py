"""Somos' constant and run-length digit dynamics.

Exact digit expansions and shift maps (digits), exact invariance checks
for the underlying measures (measure), rigorously enclosed constants
(constants), and seeded Monte Carlo experiments (simulate), behind one
CLI (somos).
"""

from .digits import (
    DigitSeq,
    Rational,
    RationalInterval,
    apply_shift,
    decode_exact,
    decode_prefix,
    digits_from_bitstream,
    encode_digits,
    format_rational,
    orbit_digits,
    parse_rational,
)
from .balls import BallValue
from .constants import (
    DigitMoments,
    IdentityCheck,
    PrecisionRequest,
    RecurrenceStep,
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
from .errors import (
    GapPointError,
    NotRepresentableError,
    OutOfDomainError,
    OutOfRangeError,
    PrecisionUnreachableError,
    ResourceLimitError,
    SomosError,
    UnsupportedBaseError,
)
from .measure import (
    InvarianceReport,
    Observable,
    birkhoff_average,
    branch_preimage,
    cylinder_measure,
    verify_lebesgue_invariance,
    verify_shift_invariance,
)

# somos.simulate (and the numba-backed kernels underneath it) stays a
# lazy submodule import so `import somos` is cheap for codec-only use

__version__ = "0.1.0"

__all__ = [
    "DigitSeq",
    "Rational",
    "RationalInterval",
    "apply_shift",
    "decode_exact",
    "decode_prefix",
    "digits_from_bitstream",
    "encode_digits",
    "format_rational",
    "orbit_digits",
    "parse_rational",
    "BallValue",
    "PrecisionRequest",
    "DigitMoments",
    "IdentityCheck",
    "RecurrenceStep",
    "digit_moments",
    "gamma_euler",
    "khinchin",
    "log_series_identity",
    "somos",
    "somos_b",
    "somos_b_root_variant",
    "somos_b_via_gamma",
    "somos_recurrence",
    "InvarianceReport",
    "Observable",
    "birkhoff_average",
    "branch_preimage",
    "cylinder_measure",
    "verify_lebesgue_invariance",
    "verify_shift_invariance",
    "SomosError",
    "OutOfRangeError",
    "NotRepresentableError",
    "GapPointError",
    "UnsupportedBaseError",
    "OutOfDomainError",
    "PrecisionUnreachableError",
    "ResourceLimitError",
    "__version__",
]
