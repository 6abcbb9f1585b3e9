"""Exception hierarchy for the mltc kernel."""
from typing import Optional, Tuple


class KernelError(Exception):
    """Base class for every error raised by the kernel."""


class PresentationError(KernelError):
    """Invalid or unresolvable presentation data."""


class UnknownNameError(PresentationError):
    """A name that is not declared in the presentation."""

    def __init__(self, name: str, where: str = ''):
        self.name = name
        suffix = f" in {where}" if where else ''
        super().__init__(f"unknown name '{name}'{suffix}")


class TermSyntaxError(KernelError):
    """Malformed term, cell rendering, presentation or proof text."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DimensionError(KernelError):
    """Operands or terms of an unexpected dimension."""


class CompositionError(KernelError):
    """A composite that is not defined (boundary or target mismatch)."""


class ParallelismError(CompositionError):
    """Replacement by a cell that is not parallel to the replaced indet."""


class PositionError(KernelError):
    """Occurrence index out of range."""

    def __init__(self, position: int, count: int, kind: str = 'occurrence'):
        self.position = position
        self.count = count
        super().__init__(f"{kind} position {position} out of range (0..{count - 1})")


class ProofError(KernelError):
    """An invalid proof step.

    Attributes:
        step: Number of the failing step, when known
        line: Proof file line of the failing step, when known
        path: Premise indices leading from the root to the failing step
    """

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        line: Optional[int] = None,
        path: Tuple[int, ...] = (),
    ):
        self.step = step
        self.line = line
        self.path = path
        where = ''
        if step is not None:
            where = f"step {step}"
            if line is not None:
                where += f" (line {line})"
            where += ': '
        super().__init__(f"{where}{message}")


class EnumerationBudgetError(KernelError):
    """An enumeration grew past its configured budget."""


class MorphismError(KernelError):
    """An indet map that does not preserve boundaries."""
