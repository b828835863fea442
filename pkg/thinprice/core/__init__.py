"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/core/__init__.py
    Module: Core Statistics Package
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Statistical core of ThinPrice: prevalence probabilities of thin
    samples, the sampling scheme itself, demand regressions with the
    measurement-error correction, and the repeated KS decision rule.

Usage:
    >>> from thinprice.core import testing
    >>> testing.rejection_rank(1000, 0.05, 0.05)
    62

Contents:
    Submodules:
        - prevalence: Exact and approximate Poisson-Binomial tails
        - sampling: One-household-per-FSU selection and seed derivation
        - inference: Design matrices, OLS, bias correction, shares
        - testing: KS test, rejection rank, repeated procedure
"""

from thinprice.core import inference, prevalence, sampling, testing

__all__ = ["inference", "prevalence", "sampling", "testing"]
