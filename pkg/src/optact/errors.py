"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class OptactError(Exception):
    """Base class for library errors."""


class DimensionError(OptactError, ValueError):
    """Operand shapes are incompatible."""


class InvalidInputError(OptactError, ValueError):
    """Input contains NaN/Inf or otherwise violates a precondition."""


class UnsupportedDimensionError(OptactError, ValueError):
    """State dimension n < 2."""


class NonControllableError(OptactError, ValueError):
    """The pair (A, b) fails the Kalman rank condition."""

    def __init__(self, message: str, rank: int | None = None, n: int | None = None):
        super().__init__(message)
        self.rank = rank
        self.n = n


class NoControllableDirectionError(NonControllableError):
    """Every sampled actuator direction gives a vanishing objective."""


class IllConditionedError(OptactError, ArithmeticError):
    """A Gramian is numerically singular."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class NumericRangeError(OptactError, OverflowError):
    """Result overflows double precision."""


class DegenerateGridError(OptactError, ValueError):
    """Time grid too short or too narrow for a slope fit."""


class InvalidSymmetryError(OptactError, ValueError):
    """A candidate matrix is not an orthogonal commutant of A."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class FactorizationViolation(OptactError, ArithmeticError):
    """Exact cost exceeds the factorized upper bound."""


class ResampleDirection(OptactError, ValueError):
    """A vector is too short to be projected onto the sphere."""
