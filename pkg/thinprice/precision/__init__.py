"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/precision/__init__.py
    Module: Precision Handling Package
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Floating-point tolerance helpers used wherever reconstructed prices,
    threshold counts or algebraically equal estimator forms are compared.

Usage:
    >>> from thinprice.precision import is_close, is_constant
    >>> is_close(0.1 + 0.2, 0.3)
    True

Contents:
    Submodules:
        - comparison: Scalar and array comparisons with tolerance
"""

from thinprice.precision.comparison import (
    PRICE_RTOL,
    is_close,
    is_constant,
    is_zero,
    relative_error,
    snap_to_integer,
    snap_unit_ratio,
)

__all__ = [
    "PRICE_RTOL",
    "is_close",
    "is_constant",
    "is_zero",
    "relative_error",
    "snap_to_integer",
    "snap_unit_ratio",
]
