"""Exception hierarchy shared by every module of the package."""


class DoublePeakError(ValueError):
    """Base class for all domain errors raised by this package."""


class EmptyInstance(DoublePeakError):
    pass


class InvalidParams(DoublePeakError):
    pass


class NonSymmetricParams(DoublePeakError):
    pass


class IndexOutOfRange(DoublePeakError):
    pass


class InvalidRange(DoublePeakError):
    pass


class InvalidLottery(DoublePeakError):
    pass


class ParseError(DoublePeakError):
    """Malformed instance text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class SearchBudgetExceeded(DoublePeakError):
    """The coalition search would need more mechanism evaluations than allowed.

    This is distinct from "no violation found": nothing is known about the
    coalitions that were not examined.
    """

    def __init__(self, budget: int, needed: int, coalition: tuple[int, ...] = ()):
        self.budget = budget
        self.needed = needed
        self.coalition = coalition
        super().__init__(
            f"coalition search needs {needed} evaluations, budget is {budget}"
            + (f" (at coalition {coalition})" if coalition else "")
        )
