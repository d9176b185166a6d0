"""Exception hierarchy shared by all drn modules."""

from __future__ import annotations


class DrnError(Exception):
    """Base class for every error raised by drn."""


class RangeViolation(DrnError):
    """A coordinate function produced a level outside its component's range."""

    def __init__(self, component: int, value: int, name: str | None = None):
        self.component = component
        self.value = value
        label = name if name is not None else f"#{component + 1}"
        super().__init__(f"rule for {label} evaluated to {value}, outside its range")


class EnumerationCapExceeded(DrnError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"enumeration of {size} states exceeds the cap of {cap}")


class NotAFrozenCore(DrnError):
    pass


class NotSymbolicSteadyState(DrnError):
    pass


class NotAComponentUnion(DrnError):
    pass


class InvariantViolation(DrnError):
    """A property guaranteed by construction failed; indicates an implementation bug."""


class ConvergenceError(InvariantViolation):
    """An iteration that must terminate did not."""


class DslError(DrnError):
    """A model file could not be turned into a network.

    ``line`` and ``col`` are 1-based; ``token`` is the offending text.
    """

    def __init__(self, message: str, line: int = 0, col: int = 0, token: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.token = token
        super().__init__(self.format())

    def format(self, filename: str = "<string>") -> str:
        where = f"{filename}:{self.line}:{self.col}: " if self.line else f"{filename}: "
        suffix = f" (at {self.token!r})" if self.token else ""
        return f"{where}{self.message}{suffix}"


class DslSyntaxError(DslError):
    pass


class UnknownComponent(DslError):
    pass


class DuplicateComponent(DslError):
    pass


class MissingDefault(DslError):
    pass


class MissingRule(DslError):
    pass


class StaticRangeViolation(DslError):
    pass
