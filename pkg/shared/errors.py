"""
Error hierarchy shared by the library modules and the command-line scripts.

Every error carries the process exit code the scripts return for it:
- 2: usage error (bad parameter values, unsupported combinations)
- 3: data error (unreadable or invalid input, manifold mismatch)
- 4: numerical failure (cut locus, sampler envelope, SPD domain)
"""
from __future__ import annotations

from typing import Iterable, List, Optional

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class ClrqError(Exception):
    """Base class for all errors raised by the quantization toolkit."""

    exit_code = EXIT_DATA
    prefix = "error"


class UsageError(ClrqError, ValueError):
    exit_code = EXIT_USAGE


class DataError(ClrqError, ValueError):
    exit_code = EXIT_DATA


class NumericalError(ClrqError, ArithmeticError):
    exit_code = EXIT_NUMERICAL


class ManifoldMismatchError(DataError):
    """Two objects that must live on the same manifold do not."""


class InvalidPointError(DataError):
    """Coordinates fail the membership predicate beyond re-projection tolerance."""


class InvalidTangentError(DataError):
    """Tangent coordinates fail the tangency predicate at their base point."""


class EmptyDataError(DataError):
    pass


class InsufficientDataError(DataError):
    """Fewer distinct observations than requested centers."""


class EmptyKernelError(DataError):
    """No traffic sample lies inside the kernel truncation radius."""


class CsvFormatError(DataError):
    """CSV input that cannot be turned into points or samples."""

    def __init__(self, message: str, lines: Optional[Iterable[int]] = None):
        self.lines: List[int] = sorted(lines) if lines else []
        if self.lines:
            shown = ", ".join(str(n) for n in self.lines[:20])
            more = f" (+{len(self.lines) - 20} more)" if len(self.lines) > 20 else ""
            message = f"{message} [lines: {shown}{more}]"
        super().__init__(message)


class CutLocusError(NumericalError):
    """Logarithm requested across the cut locus (antipodal points on the sphere)."""


class SamplerEnvelopeError(NumericalError):
    """Rejection sampler acceptance rate fell below the envelope guard."""


class SpdDomainError(InvalidPointError, NumericalError):
    """Matrix is not symmetric positive definite within tolerance."""

    exit_code = EXIT_DATA
