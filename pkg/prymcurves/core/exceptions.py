"""
Error hierarchy for prymcurves.

Library code raises these; only the command line front end turns them into
process exit codes.
"""

from typing import List, Optional


class PrymCurvesError(Exception):
    exit_code = 1


class InvalidInputError(PrymCurvesError, ValueError):
    """Bad arguments or malformed stage input."""
    exit_code = 1


class ConductorMismatch(InvalidInputError):
    """Cyclotomic operands live in different fields Q(zeta_N)."""


class NotCoprimeError(InvalidInputError):
    """Galois action requested for an exponent sharing a factor with N."""


class FieldMismatch(InvalidInputError):
    """Quadratic operands live in different fields Q(sqrt D0)."""


class ParityError(InvalidInputError):
    """Reduced intersection matrix with an odd (1,2) entry."""


class UpstreamMissing(InvalidInputError):
    """A stage was started without the file produced by the previous stage."""


class UnderdeterminedSystem(PrymCurvesError):
    """The (beta, gamma) elimination system has a positive-dimensional solution set."""


class SingularSystem(PrymCurvesError):
    """Widths and their conjugates do not form an invertible 2x2 system."""


class NormalizationError(PrymCurvesError):
    """A flat surface cannot be brought into prototype normal form."""


class IdentityCheckFailed(PrymCurvesError):
    exit_code = 2


class RegressionMismatch(PrymCurvesError):
    """Computed results disagree with the published tables."""
    exit_code = 3

    def __init__(self, message: str, mismatches: Optional[List[str]] = None):
        super().__init__(message)
        self.mismatches = list(mismatches or [])

    def __str__(self) -> str:
        base = super().__str__()
        if not self.mismatches:
            return base
        return base + "\n" + "\n".join(f"  - {m}" for m in self.mismatches)
