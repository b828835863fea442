"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/__init__.py
    Module: ThinPrice Package Root
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    ThinPrice - thin price sampling for household consumption surveys.

    Household consumer expenditure surveys ask every sampled household for
    both the quantity and the value of each food item it consumed. Prices
    paid are nearly uniform within a first stage unit (FSU), so asking a
    single randomly chosen household per FSU for its price, and imputing
    that price to its neighbours, cuts respondent burden. ThinPrice
    evaluates whether that "thin" scheme preserves estimated demand
    behaviour:

    1. Screening of items by within-FSU price-ratio histograms
    2. Prevalence probabilities of the thin sample (exact Poisson-Binomial
       and normal approximation)
    3. Log-log demand fits on actual and substituted prices, with a
       measurement-error bias correction
    4. A 1000-repetition Kolmogorov-Smirnov procedure with an exact
       binomial rejection rank

Usage:
    >>> import thinprice
    >>> print(thinprice.__version__)
    0.1.0

    >>> from thinprice.core.testing import rejection_rank
    >>> rejection_rank(1000, 0.05, 0.05)
    62

CLI Usage:
    $ thinprice --help
    $ thinprice run --config run.json
    $ thinprice synth --config run.json --output out/

Contents:
    Modules:
        - survey: Dataset ingestion, screening, synthetic data
        - core: Prevalence, thin sampling, inference, repeated testing
        - pipeline: Orchestration and report emitters
        - precision: Floating-point tolerance helpers
        - cli: Command-line interface with Rich output
        - utils: Logging and atomic file IO

    Exports:
        - __version__: Package version string
        - __author__: Author information
        - __license__: License type

Dependencies:
    - Python 3.9+ required
    - numpy, scipy, pandas, typer, rich

Notes:
    All randomness flows from an explicit master seed; nothing reads an
    ambient entropy source.
"""

__version__ = "0.1.0"
__author__ = "ThinPrice Development Team"
__license__ = "MIT"
__all__ = ["__version__", "__author__", "__license__"]

# Package metadata
__title__ = "thinprice"
__description__ = "Thin price sampling with repeated KS evaluation"
