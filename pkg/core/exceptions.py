"""Error taxonomy for the toolkit.

Each error carries enough diagnostics to be reported by the CLI without a
traceback. The CLI maps the classes to exit codes (see cli.app).
"""
from typing import Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ToolkitError, ValueError):
    """An operator or domain object violates its invariants."""


class DimensionMismatchError(ValidationError):
    """Operands live on incompatible spaces."""


class ParameterError(ToolkitError, ValueError):
    """A scalar parameter (epsilon, c, m, rank, ...) is out of range."""


class CapExceededError(ValidationError):
    """A composite dimension or enumeration size exceeds its configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class NumericalError(ToolkitError, ArithmeticError):
    """Eigensolver failure or a bracket that could not be established."""


class CertificationError(ToolkitError, ArithmeticError):
    """Primal and dual values disagree by more than the allowed gap."""

    def __init__(self, primal: float, dual: float, tolerance: float):
        gap = dual - primal
        super().__init__(
            f"duality gap {gap:.3e} exceeds tolerance {tolerance:.1e} "
            f"(primal={primal!r}, dual={dual!r})"
        )
        self.primal = primal
        self.dual = dual
        self.gap = gap
        self.tolerance = tolerance


class DecoderError(ToolkitError, ValueError):
    """The square-root decoder is undefined for the given operators."""


class ParseError(ToolkitError, ValueError):
    """A channel/state file could not be parsed."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ):
        where = path or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        if field:
            where += f" [{field}]"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.column = column
        self.field = field
