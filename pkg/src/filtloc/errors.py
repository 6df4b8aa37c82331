"""Exception types. The CLI maps these onto exit codes."""

from __future__ import annotations


class FiltlocError(Exception):
    exit_code = 1


class MalformedInput(FiltlocError):
    exit_code = 2


class PreconditionError(FiltlocError):
    exit_code = 3


class DimensionMismatch(PreconditionError):
    pass


class SingularMatrix(PreconditionError):
    pass


class NotInvariant(PreconditionError):
    """A subspace is not preserved; carries the offending generator and vector."""

    def __init__(self, message: str, generator=None, vector=None):
        super().__init__(message)
        self.generator = generator
        self.vector = vector


class BudgetExceeded(PreconditionError):
    pass


class IncompleteCertificate(FiltlocError):
    """The invariant-subspace search could not certify completeness."""

    exit_code = 4
