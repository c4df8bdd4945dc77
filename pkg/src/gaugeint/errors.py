"""Exception hierarchy shared by all modules."""


class GaugeIntError(Exception):
    """Base class for library errors."""


class ZeroLengthError(GaugeIntError, ValueError):
    pass


class CoverOverlapError(GaugeIntError, ValueError):
    pass


class PartitionBudgetError(GaugeIntError):
    """A partition cap was hit. Subclasses say which one."""

    code = "BUDGET"


class DepthExceeded(PartitionBudgetError):
    code = "DEPTH_EXCEEDED"


class CellBudgetExceeded(PartitionBudgetError):
    code = "CELL_BUDGET_EXCEEDED"


class ParseError(GaugeIntError, ValueError):
    def __init__(self, message, offset, expected=()):
        self.message = message
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at byte offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class SchemaError(GaugeIntError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ProblemIOError(GaugeIntError, OSError):
    pass


class DomainError(GaugeIntError, ValueError):
    pass
