"""Exception hierarchy.

Domain errors (anything a caller can trigger with a mathematically bad
input) derive from :class:`PadicError`; the CLI maps them to exit code 1.
:class:`UsageError` covers malformed calls and maps to exit code 3.
"""

from __future__ import annotations


class PadicError(Exception):
    """Base class for domain errors."""


class UsageError(PadicError, ValueError):
    """Malformed call: prime mismatch, bad flags, bad dimensions."""


class NotAUnit(PadicError):
    pass


class NotDivisible(PadicError):
    pass


class PrecisionExhausted(PadicError):
    pass


class OutOfChart(PadicError):
    """A coordinate is not divisible by p, so the vector is outside the chart ball."""


class OutOfDomain(PadicError):
    pass


class NonContraction(PadicError):
    """A fixed-point iteration failed to gain digits; the group model is broken."""


class ConvergenceFailure(PadicError):
    pass


class SingularBasis(PadicError):
    pass
