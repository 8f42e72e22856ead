"""Working-precision control for every numerical routine in the package.

All scalar arithmetic is done with mpmath's arbitrary-precision reals; a
``PrecisionPolicy`` decides how many bits each computation gets.  The policy
is explicit everywhere (no hidden global precision): oscillatory integrals
with an exp(pi^2/(2 tau)) envelope must escalate their working precision to
survive the cancellation, and the caller owns that decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mpf

# Arbitrary-precision real scalar.  mpmath mpf values carry their mantissa
# exactly; the precision they were computed at is set by the enclosing
# workprec context.
BigReal = mpmath.mpf

LN10 = math.log(10.0)
BITS_PER_DIGIT = math.log2(10.0)

#: digits of headroom added on top of the cancellation + target budget
GUARD_DIGITS = 16


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularEvaluationError(DomainError):
    """Evaluation requested exactly at a non-removable singular point."""


class AccuracyLossError(ArithmeticError):
    """A computation cannot reach the requested accuracy."""


class CancellationError(AccuracyLossError):
    """Catastrophic cancellation consumed the working precision."""


class PrecisionEscalationError(AccuracyLossError):
    """Fixed working precision is insufficient; carries the bits needed."""

    def __init__(self, message: str, required_bits: int):
        super().__init__(message)
        self.required_bits = required_bits


class ConvergenceError(RuntimeError):
    """An iterative scheme (quadrature truncation, series) failed to converge."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Rule choosing the working precision of each computation.

    mode "auto" sizes the precision from the expected cancellation: for a
    Gruet-type oscillatory integral at time parameter tau the working
    decimal digits are at least

        16 + ceil(pi^2 / (2 tau ln 10)) + ceil(-log10(target_rel_tol)).

    mode "fixed" always uses ``bits`` and raises PrecisionEscalationError
    when a computation detects that more would be needed.
    """

    mode: str = "auto"
    bits: int | None = None
    target_rel_tol: float = 1e-12

    def __post_init__(self):
        if self.mode not in ("auto", "fixed"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "fixed" and (self.bits is None or self.bits <= 0):
            raise ValueError("fixed mode requires a positive bit count")
        if not self.target_rel_tol > 0:
            raise ValueError("target_rel_tol must be positive")

    @property
    def target_digits(self) -> int:
        return max(1, math.ceil(-math.log10(self.target_rel_tol)))

    def digits(self, cancellation_nats: float = 0.0, extra_digits: int = 0) -> int:
        """Working decimal digits for a task losing ``cancellation_nats``."""
        if self.mode == "fixed":
            return max(1, int(self.bits / BITS_PER_DIGIT))
        cancel_digits = math.ceil(max(0.0, cancellation_nats) / LN10)
        return GUARD_DIGITS + cancel_digits + self.target_digits + max(0, extra_digits)

    def working_bits(self, cancellation_nats: float = 0.0, extra_digits: int = 0) -> int:
        if self.mode == "fixed":
            return self.bits
        return math.ceil(self.digits(cancellation_nats, extra_digits) * BITS_PER_DIGIT)

    def oscillatory_digits(self, tau: float, extra_digits: int = 0) -> int:
        """Digits for a Gruet-type integral at time parameter ``tau``."""
        if tau <= 0:
            raise DomainError("time parameter must be positive")
        return self.digits(math.pi ** 2 / (2.0 * tau), extra_digits)

    def oscillatory_bits(self, tau: float, extra_digits: int = 0) -> int:
        return math.ceil(self.oscillatory_digits(tau, extra_digits) * BITS_PER_DIGIT)

    def workprec(self, cancellation_nats: float = 0.0, extra_digits: int = 0):
        """Context manager setting the mpmath working precision."""
        return mpmath.workprec(self.working_bits(cancellation_nats, extra_digits))

    def require_bits(self, needed_bits: int, what: str) -> int:
        """Bits actually usable for a task needing ``needed_bits``.

        In fixed mode a shortfall raises rather than silently degrading.
        """
        if self.mode == "fixed" and self.bits < needed_bits:
            raise PrecisionEscalationError(
                f"{what} needs {needed_bits} bits but policy fixes {self.bits}",
                required_bits=needed_bits,
            )
        return needed_bits if self.mode == "auto" else self.bits


def auto(target_rel_tol: float = 1e-12) -> PrecisionPolicy:
    return PrecisionPolicy(mode="auto", target_rel_tol=target_rel_tol)


def fixed(bits: int, target_rel_tol: float = 1e-12) -> PrecisionPolicy:
    return PrecisionPolicy(mode="fixed", bits=bits, target_rel_tol=target_rel_tol)


DEFAULT_POLICY = auto()


def to_mpf(x) -> mpf:
    """Exact conversion to mpf (floats are binary rationals, hence exact)."""
    if isinstance(x, mpf):
        return x
    return mpmath.mpf(x)
