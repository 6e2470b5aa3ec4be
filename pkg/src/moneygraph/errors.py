"""Engine error taxonomy.

Every failure mode carries a stable symbolic code (``Err*``). The codes are
the contract surface: the scenario DSL's ``expect_error`` statements match on
them, and the HTTP service returns them verbatim in 422 payloads.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine failures."""

    code = "ErrEngine"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class DuplicateCentralBankError(EngineError):
    code = "ErrDuplicateCentralBank"


class DuplicateTreasuryError(EngineError):
    code = "ErrDuplicateTreasury"


class IssuerRequiredError(EngineError):
    code = "ErrIssuerRequired"


class NegativeAmountError(EngineError):
    code = "ErrNegativeAmount"


class ZeroAmountError(EngineError):
    code = "ErrZeroAmount"


class RegimeViolationError(EngineError):
    code = "ErrRegimeViolation"


class UnknownAgentError(EngineError):
    code = "ErrUnknownAgent"


class UnknownInstrumentError(EngineError):
    code = "ErrUnknownInstrument"


class UnknownCurrencyError(EngineError):
    code = "ErrUnknownCurrency"


class UnknownCommodityError(EngineError):
    code = "ErrUnknownCommodity"


class SelfClaimError(EngineError):
    code = "ErrSelfClaim"


class KindMismatchError(EngineError):
    code = "ErrKindMismatch"


class InsufficientCommodityError(EngineError):
    code = "ErrInsufficientCommodity"


class InsufficientBackingError(EngineError):
    code = "ErrInsufficientBacking"


class InsufficientDepositError(EngineError):
    code = "ErrInsufficientDeposit"


class InsufficientReservesError(EngineError):
    code = "ErrInsufficientReserves"


class InsufficientNotesError(EngineError):
    code = "ErrInsufficientNotes"


class InsufficientBondError(EngineError):
    code = "ErrInsufficientBond"


class ExceedsLoanError(EngineError):
    code = "ErrExceedsLoan"


class InsufficientTreasuryBalanceError(EngineError):
    code = "ErrInsufficientTreasuryBalance"


class MissingAgentError(EngineError):
    code = "ErrMissingAgent"


class CurrencyMismatchError(EngineError):
    code = "ErrCurrencyMismatch"


class NoBankError(EngineError):
    code = "ErrNoBank"


class ReservesDepletedError(EngineError):
    code = "ErrReservesDepleted"


class IndivisibleError(EngineError):
    code = "ErrIndivisible"


class InsufficientClaimError(EngineError):
    code = "ErrInsufficientClaim"


class BadDistributionError(EngineError):
    code = "ErrBadDistribution"


class TooLargeError(EngineError):
    code = "ErrTooLarge"


class BadSnapshotError(EngineError):
    code = "ErrBadSnapshot"


class NothingToUndoError(EngineError):
    code = "ErrNothingToUndo"


class NothingToRedoError(EngineError):
    code = "ErrNothingToRedo"


class UnknownOperationError(EngineError):
    code = "ErrUnknownOperation"


class ParseError(EngineError):
    """Scenario text rejected; first error aborts parsing."""

    code = "ErrParse"

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.detail = message


class AssertFailedError(EngineError):
    code = "ErrAssertFailed"

    def __init__(self, line: int, expected: str, actual: str):
        super().__init__(f"line {line}: expected {expected}, actual {actual}")
        self.line = line
        self.expected = expected
        self.actual = actual


class UnexpectedOutcomeError(EngineError):
    """A scenario statement failed in a way the scenario did not declare."""

    code = "ErrUnexpected"

    def __init__(self, line: int, code_seen: str, message: str = ""):
        super().__init__(f"line {line}: {code_seen}{': ' + message if message else ''}")
        self.line = line
        self.code_seen = code_seen


def _build_code_registry() -> dict[str, type]:
    registry: dict[str, type] = {}
    stack = [EngineError]
    while stack:
        cls = stack.pop()
        registry[cls.code] = cls
        stack.extend(cls.__subclasses__())
    return registry


#: Maps an ``Err*`` code string to its exception class.
CODE_REGISTRY = _build_code_registry()
