"""Exception hierarchy for Loewner."""

from typing import Optional, Tuple


class LoewnerError(Exception):
    """Base class for every error raised by the library."""


class ConfigurationError(LoewnerError):
    """Invalid tolerance or guard configuration."""


# Matrix core

class MatrixError(LoewnerError):
    """Base class for linear algebra failures."""


class NotHermitianError(MatrixError):
    """Input is not Hermitian within the construction tolerance."""

    def __init__(self, residual: float, tolerance: float):
        super().__init__(f"matrix is not Hermitian (residual {residual:.3e} > {tolerance:.3e})")
        self.residual = residual
        self.tolerance = tolerance


class NotPositiveDefiniteError(MatrixError):
    """Input is not positive definite; carries the offending margin."""

    def __init__(self, margin: float, floor: float):
        super().__init__(f"matrix is not positive definite (margin {margin:.6g} <= floor {floor:.3e})")
        self.margin = margin
        self.floor = floor


class DimensionMismatchError(MatrixError):
    """Operands or blocks have incompatible shapes."""


class EigenSolverError(MatrixError):
    """The eigensolver did not converge."""


# Expression language

class ExpressionError(LoewnerError):
    """Base class for parse and evaluation failures."""


class ExpressionSyntaxError(ExpressionError):
    """Source text does not match the grammar."""

    def __init__(self, message: str, position: int, column: int):
        super().__init__(f"syntax error at position {position}: {message}")
        self.position = position
        self.column = column


class UnknownVariableError(ExpressionError):
    """Variable index outside 1..k."""

    def __init__(self, index: int, arity: int):
        super().__init__(f"unknown variable r{index} for a function of {arity} variable(s)")
        self.index = index
        self.arity = arity


class UnknownFunctionError(ExpressionError):
    """Call to a function name outside sqrt/exp/log."""

    def __init__(self, name: str):
        super().__init__(f"unknown function '{name}'")
        self.name = name


class DomainError(ExpressionError):
    """Evaluation left the real domain of an operation."""


class SpectrumOutsideDomainError(DomainError):
    """An eigenvalue of an operand lies outside the declared domain of its variable."""

    def __init__(self, variable: int, eigenvalue: float, domain: str):
        super().__init__(f"eigenvalue {eigenvalue:.6g} of operand r{variable} lies outside {domain}")
        self.variable = variable
        self.eigenvalue = eigenvalue


# Functional calculus

class CommutationError(LoewnerError):
    """Operands that must commute do not."""

    def __init__(self, pair: Tuple[int, int], residual: float):
        super().__init__(
            f"operands r{pair[0]} and r{pair[1]} do not commute (residual {residual:.3e})"
        )
        self.pair = pair
        self.residual = residual


class DegenerateSpectrumError(LoewnerError):
    """No common eigenbasis could be resolved within the retry cap."""


# Decompositions

class DecompositionError(LoewnerError):
    """A decomposition does not sum to its target or has a non-definite part."""


class UnitaryRowError(LoewnerError):
    """A row violates the unitary-row identity or has a singular entry."""


class PartitionError(LoewnerError):
    """Invalid partition of unity request or result."""


# Checkers

class PreconditionError(LoewnerError):
    """Instance preconditions (such as 0 <= x <= y) do not hold."""

    def __init__(self, message: str, margin: Optional[float] = None):
        super().__init__(message)
        self.margin = margin


class WitnessFormatError(LoewnerError):
    """A witness or matrix file cannot be read."""


class InvalidIndexError(LoewnerError):
    """Index (l, j) or multi-index outside its admissible range."""
