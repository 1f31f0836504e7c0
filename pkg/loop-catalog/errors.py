"""Exception hierarchy for the loop catalog engine."""

from typing import Any, Optional


class LoopError(ValueError):
    """Base class for every expected failure raised by the engine."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class LoopValidationError(LoopError):
    """A multiplication table violates the loop axioms."""


class TableParseError(LoopError):
    """A Cayley table file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, witness=line)
        self.line = line


class NotCommutativeError(LoopError):
    """An operation that needs a commutative loop received a noncommutative one."""


class NotNormalError(LoopError):
    """A subloop is moved off itself by some inner mapping."""


class OrderCapExceeded(LoopError):
    """A construction would materialise a table above the configured order cap."""


class BudgetExceeded(LoopError):
    """The isomorphism search ran out of nodes before reaching a verdict."""


class CocycleError(LoopError):
    """A cocycle is not normalized."""


class DecompositionMismatch(LoopError):
    """A canonical word failed to re-evaluate to the element it came from."""


class OutsideVarietyError(LoopError):
    """A target loop cannot receive a homomorphism from the free loop F_p."""


class UnlabeledOrbitError(LoopError):
    """An orbit of the GL2(p) action contains none of the named representatives."""


class CertificationError(LoopError):
    """A catalog entry failed one of its certificates."""

    def __init__(self, entry: str, certificate: str, detail: str = ""):
        message = f"certification failed: {entry}: {certificate}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message, witness=(entry, certificate))
        self.entry = entry
        self.certificate = certificate
