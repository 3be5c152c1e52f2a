"""
Error types
Exception hierarchy shared by the monitor modules
"""

from typing import List, Optional


class StrelError(Exception):
    """Base class for every error raised by the monitor"""


class AlgebraTypeError(StrelError, TypeError):
    """Operand outside the carrier of an algebra or distance domain"""


class InvalidIntervalError(StrelError, ValueError):
    """Interval whose lower bound exceeds its upper bound"""


class ModelValidationError(StrelError, ValueError):
    """Spatial model rejected during validation"""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class PathError(StrelError, ValueError):
    """Path not realizable in a spatial model, or unknown origin"""


class ParseError(StrelError, ValueError):
    """Formula text that does not match the grammar"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnknownDistanceFunctionError(ParseError):
    """Distance function name missing from the registry"""


class UnsupportedOperatorError(StrelError, ValueError):
    """Operator recognised by the grammar but not monitored"""


class PolynomialError(StrelError, ValueError):
    """Missing assignment, valuation or negation for a polynomial variable"""


class AutomatonError(StrelError, ValueError):
    """Automaton construction or transition failure"""


class UniverseMismatchError(AutomatonError):
    """Snapshot whose location set differs from the automaton universe"""


class UnknownLocationError(AutomatonError):
    """Location outside the automaton universe"""


class LabelingError(StrelError, KeyError):
    """Attribute required by a predicate is missing at a location"""

    def __init__(self, location: str, step: Optional[int], attribute: str):
        self.location = location
        self.step = step
        self.attribute = attribute
        super().__init__(f"attribute '{attribute}' missing at location '{location}' (step {step})")

    def __str__(self) -> str:
        return self.args[0]


class TraceFormatError(StrelError, ValueError):
    """Malformed trace file"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ScenarioConfigError(StrelError, ValueError):
    """Invalid or infeasible scenario configuration"""


class TimeIndexError(StrelError, IndexError):
    """Time index outside the trace"""
