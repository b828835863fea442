"""
Metadata:
    Project: ThinPrice
    File Name: comparison.py
    File Path: thinprice/precision/comparison.py
    Module: Floating-Point Comparison
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Tolerance-based comparisons for the places where survey arithmetic
    meets floating point. Unit prices are rebuilt as value / quantity, so
    two households that paid the same price can differ by a few ulps;
    threshold counts such as 1000 * 0.3 come out as 300.00000000000006.
    These helpers decide when such differences are noise.

Usage:
    >>> from thinprice.precision.comparison import is_close, snap_to_integer
    >>> is_close(0.1 + 0.2, 0.3)
    True

    >>> snap_to_integer(1000 * 0.3)
    300.0

Contents:
    Functions:
        - is_close: Scalar equality with relative and absolute tolerance
        - is_zero: Scalar near-zero check
        - snap_to_integer: Round values that sit within tolerance of an integer
        - snap_unit_ratio: Map ratios within tolerance of 1 to exactly 1
        - is_constant: Zero-variance check for a column
        - relative_error: Norm-wise relative difference of two arrays

Dependencies:
    - math: Standard library math functions
    - numpy: Array reductions

Notes:
    PRICE_RTOL (1e-12) is far below any economically meaningful price
    difference and far above the ulp noise of value / quantity.
"""

import math
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

Number = Union[int, float]

# Default tolerance for scalar comparisons
DEFAULT_EPSILON = 1e-9

# Relative tolerance under which two reconstructed unit prices are equal
PRICE_RTOL = 1e-12


def is_close(
    a: Number,
    b: Number,
    rel_tol: float = DEFAULT_EPSILON,
    abs_tol: float = DEFAULT_EPSILON,
) -> bool:
    """
    Check if two numbers are approximately equal within tolerance.

    Args:
        a (Number): First value
        b (Number): Second value
        rel_tol (float): Relative tolerance (default: 1e-9)
        abs_tol (float): Absolute tolerance (default: 1e-9)

    Returns:
        bool: True if abs(a - b) <= max(rel_tol * max(|a|, |b|), abs_tol)

    Examples:
        >>> is_close(0.1 + 0.2, 0.3)
        True

        >>> is_close(1.0, 2.0)
        False

    Notes:
        NaN is never close to anything; infinity is only close to itself.

    Version: 0.1.0
    """
    if math.isnan(a) or math.isnan(b):
        return False

    if math.isinf(a) or math.isinf(b):
        return a == b

    return abs(a - b) <= max(rel_tol * max(abs(a), abs(b)), abs_tol)


def is_zero(value: Number, tolerance: float = DEFAULT_EPSILON) -> bool:
    """
    Check if a number is approximately zero within an absolute tolerance.

    Examples:
        >>> is_zero(1e-15)
        True

        >>> is_zero(0.001)
        False

    Version: 0.1.0
    """
    if math.isnan(value):
        return False

    return abs(value) <= tolerance


def snap_to_integer(value: float, tolerance: float = DEFAULT_EPSILON) -> float:
    """
    Return the nearest integer if value lies within tolerance of it.

    Products like N * q are computed in binary floating point, so an
    integral product may arrive a few ulps above or below the integer.
    Ceilings taken on the raw product would then be off by one.

    Args:
        value (float): Value to snap
        tolerance (float): Absolute and relative tolerance (default: 1e-9)

    Returns:
        float: round(value) if close to it, otherwise value unchanged

    Examples:
        >>> snap_to_integer(300.00000000000006)
        300.0

        >>> snap_to_integer(300.5)
        300.5

    Version: 0.1.0
    """
    nearest = float(round(value))
    if is_close(value, nearest, rel_tol=tolerance, abs_tol=tolerance):
        return nearest
    return float(value)


def snap_unit_ratio(ratio: float, rel_tol: float = PRICE_RTOL) -> float:
    """
    Report a min/max price ratio within rel_tol of 1 as exactly 1.0.

    Examples:
        >>> snap_unit_ratio(0.9999999999999998)
        1.0

        >>> snap_unit_ratio(0.8)
        0.8

    Version: 0.1.0
    """
    if is_close(ratio, 1.0, rel_tol=rel_tol, abs_tol=0.0):
        return 1.0
    return float(ratio)


def is_constant(values: ArrayLike, rel_tol: float = PRICE_RTOL) -> bool:
    """
    Check whether a column has zero variance up to relative tolerance.

    The spread (max - min) is compared against rel_tol scaled by the
    largest magnitude in the column, with a floor of rel_tol for columns
    centred on zero (e.g. log price ratios).

    Args:
        values (ArrayLike): Column to inspect
        rel_tol (float): Relative tolerance (default: 1e-12)

    Returns:
        bool: True for empty, constant or ulp-noise columns

    Examples:
        >>> is_constant([1.0, 1.0, 1.0])
        True

        >>> is_constant([0.0, 1e-17, -1e-17])
        True

        >>> is_constant([1.0, 2.0])
        False

    Version: 0.1.0
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return True
    spread = float(np.max(arr) - np.min(arr))
    scale = max(1.0, float(np.max(np.abs(arr))))
    return is_zero(spread, tolerance=rel_tol * scale)


def relative_error(actual: ArrayLike, reference: ArrayLike) -> float:
    """
    Norm-wise relative difference ||actual - reference|| / ||reference||.

    Falls back to the absolute norm when the reference is the zero vector.

    Examples:
        >>> relative_error([1.0, 2.0], [1.0, 2.0])
        0.0

    Version: 0.1.0
    """
    a = np.asarray(actual, dtype=float)
    r = np.asarray(reference, dtype=float)
    if a.shape != r.shape:
        raise ValueError(f"Shape mismatch: {a.shape} vs {r.shape}")
    diff = float(np.linalg.norm(a - r))
    denom = float(np.linalg.norm(r))
    if denom == 0.0:
        return diff
    return diff / denom
