"""Exception hierarchy shared across the package.

The CLI maps these onto exit statuses, so new error types should subclass
the group they belong to rather than `OpenFutureError` directly.
"""

from __future__ import annotations


class OpenFutureError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(OpenFutureError, ValueError):
    """Operands live on Hilbert spaces of incompatible dimension."""


class CapacityError(OpenFutureError):
    """A dense state or operator would exceed the configured maximum dimension."""


class NotHermitianError(OpenFutureError, ValueError):
    pass


class NotUnitaryError(OpenFutureError, ValueError):
    pass


class LabelError(OpenFutureError, KeyError):
    """Unknown experience label, or labels that do not match a basis."""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the message readable.
        return str(self.args[0]) if self.args else ""


class GridError(OpenFutureError, ValueError):
    """A time is outside the simulated range or off a circuit's step grid."""


class PreconditionError(OpenFutureError, ValueError):
    pass


class NullBranchError(OpenFutureError):
    """A conditional probability was requested relative to a branch of zero weight."""

    def __init__(self, label: str, time: float, weight: float):
        self.label = label
        self.time = time
        self.weight = weight
        super().__init__(
            f"null branch: {label!r} has weight {weight:.3g} at t={time:g}; "
            "conditional probability is undefined"
        )


class ScenarioError(OpenFutureError):
    """Problems with a scenario definition (exit status 2 in the CLI)."""


class ConfigParseError(ScenarioError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"config parse error at line {line}, column {column}: {message}")


class ScenarioValidationError(ScenarioError, ValueError):
    """A scenario violates one of its invariants; `invariant` names which one."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}")


class PropositionSyntaxError(OpenFutureError, ValueError):
    """Syntax error in proposition text. `position` is a 0-based character offset."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        self.column = position + 1
        super().__init__(f"syntax error at column {self.column}: {message}")

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.position}^"
