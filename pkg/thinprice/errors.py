"""
Metadata:
    Project: ThinPrice
    File Name: errors.py
    File Path: thinprice/errors.py
    Module: Exception Hierarchy
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Exceptions raised by ThinPrice. Every class carries the process exit
    code of its category so the CLI can map any failure to a status
    without a lookup table:

        0  success
        1  configuration error
        2  data error
        3  numerical failure

    Data and configuration errors also derive from ValueError (lookups
    from KeyError) so callers catching built-in exceptions keep working.

Contents:
    Classes:
        - ThinPriceError: Root of the hierarchy
        - ConfigError: Invalid run configuration
        - DataError: Bad input data (schema, rows, lookups)
        - NumericalError: Solver and distribution failures
"""

from typing import Optional, Sequence

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class ThinPriceError(Exception):
    """Base class for all ThinPrice errors."""

    exit_code: int = EXIT_DATA


# ===== CONFIGURATION =====


class ConfigError(ThinPriceError, ValueError):
    """Run configuration is invalid or unreadable."""

    exit_code = EXIT_CONFIG

    def __init__(self, message: str, violations: Optional[Sequence[str]] = None) -> None:
        super().__init__(message)
        self.violations = list(violations or [])


# ===== DATA =====


class DataError(ThinPriceError, ValueError):
    """Input data violates the survey schema or its invariants."""

    exit_code = EXIT_DATA


class SchemaError(DataError):
    """A required column cannot be resolved through the schema mapping."""

    def __init__(self, column: str, source_name: str) -> None:
        super().__init__(f"Missing column '{source_name}' (mapped from field '{column}')")
        self.column = column
        self.source_name = source_name


class RowValidationError(DataError):
    """A single input row failed validation; collected rather than raised by load_csv."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class DuplicateRecordError(DataError):
    """The same (fsu, household, item) triple appears more than once."""


class DatasetMismatchError(DataError):
    """An assignment, fit or star-price list does not belong to the dataset given."""


class UnknownItemError(DataError, KeyError):
    """Item code not present in the dataset."""

    def __init__(self, item: int) -> None:
        super().__init__(f"Item {item} not present in dataset")
        self.item = item

    def __str__(self) -> str:
        return str(self.args[0])


class UnknownHouseholdError(DataError, KeyError):
    """Household key not present in the dataset."""

    def __str__(self) -> str:
        return str(self.args[0])


# ===== NUMERICAL =====


class NumericalError(ThinPriceError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""

    exit_code = EXIT_NUMERICAL


class RankDeficiencyError(NumericalError):
    """Design matrix is rank deficient after degenerate-column pruning."""

    def __init__(self, collinear: Sequence[str], rank: int, n_columns: int) -> None:
        names = ", ".join(collinear)
        super().__init__(
            f"Design matrix has rank {rank} < {n_columns} columns; collinear columns: {names}"
        )
        self.collinear = list(collinear)


class SingularSystemError(NumericalError):
    """Least-squares system is numerically singular."""

    def __init__(self, condition_number: float, cap: float) -> None:
        super().__init__(
            f"Least-squares system is numerically singular: condition number "
            f"{condition_number:.3e} exceeds cap {cap:.1e}"
        )
        self.condition_number = condition_number


class BiasCorrectionUnstableError(NumericalError):
    """X'X - V'V is singular or too badly conditioned to invert."""


class DegenerateDistributionError(NumericalError):
    """All Bernoulli probabilities are 0 or 1, so S_N = 0."""

    def __init__(self) -> None:
        super().__init__("degenerate: all p_i in {0,1}; use prevalence_exact")


class ExactComputationCapError(NumericalError):
    """Exact Poisson-Binomial pmf requested above the configured size cap."""

    def __init__(self, n: int, cap: int) -> None:
        super().__init__(
            f"Exact pmf for N={n} exceeds cap {cap}; use prevalence_approx instead"
        )
        self.n = n
        self.cap = cap


class SeedCollisionError(NumericalError):
    """Two repetitions derived the same seed."""
