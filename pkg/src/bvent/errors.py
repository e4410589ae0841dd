"""Exception types shared across the package.

The CLI maps these onto distinct exit codes (parse 2, class violation 3,
range 4), so library code should raise the most specific one that applies.
"""


class BventError(Exception):
    """Base class for all package errors."""


class DomainMismatchError(BventError):
    """Two functions do not share the same cube (dimension or side length)."""


class ClassViolationError(BventError):
    """A function violates the sup-norm or variation budget it was declared in."""


class RangeError(BventError):
    """A parameter (typically an accuracy eps) is outside its admissible range."""


class ParseError(BventError):
    """Malformed grid JSON or bitstream input."""
