"""Exception hierarchy shared by every layer of the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by epsreason."""


class ParseError(EngineError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class UnknownAtom(ParseError):
    def __init__(self, name: str, line: int = 1, column: int = 1):
        super().__init__(f"unknown atom {name!r}", line, column)
        self.name = name


class DuplicateAtomDeclaration(ParseError):
    pass


class StrengthNotPositive(ParseError):
    pass


class VocabularyTooLarge(EngineError):
    pass


class NegativeOperand(EngineError, ValueError):
    pass


class RootMismatch(EngineError, ValueError):
    pass


class ZeroConditioning(EngineError, ZeroDivisionError):
    pass


class VocabularyMismatch(EngineError, ValueError):
    pass


class ConditioningOnImpossible(EngineError):
    pass


class InconsistentDelta(EngineError):
    """The default set admits no tolerance partition (not p-consistent)."""


class DegenerateDistribution(EngineError):
    pass


class TooLargeForOracle(EngineError):
    pass


class MEDivergence(EngineError):
    pass


class MEInfeasible(EngineError):
    pass


class SolverFailure(EngineError):
    pass
