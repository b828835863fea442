"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/survey/__init__.py
    Module: Survey Data Package
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Household consumption survey records: ingestion and validation,
    item screening by within-FSU price dispersion, and a synthetic
    generator with known ground truth.

Usage:
    >>> from thinprice.survey import SynthConfig, generate, make_ground_truth
    >>> cfg = SynthConfig(n_fsu=20)
    >>> ds = generate(cfg, make_ground_truth(cfg, seed=1), seed=1)
    >>> ds.items
    (101,)

Contents:
    Submodules:
        - dataset: Records, SurveyDataset, CSV I/O, prices and shares
        - screening: Price-ratio histograms and include/exclude verdicts
        - synth: Synthetic survey generator
"""

from thinprice.survey.dataset import (
    HouseholdKey,
    HouseholdRecord,
    ItemObservation,
    SchemaConfig,
    Sector,
    SurveyDataset,
    fsu_price_ratios,
    household_share,
    load_csv,
    unit_price,
    write_csv,
)
from thinprice.survey.screening import (
    ExclusionReason,
    ScreeningReport,
    ScreeningRules,
    screen_items,
)
from thinprice.survey.synth import (
    GroundTruth,
    SynthConfig,
    generate,
    load_synthetic_spec,
    make_ground_truth,
    true_prevalence_probs,
)

__all__ = [
    "ExclusionReason",
    "GroundTruth",
    "HouseholdKey",
    "HouseholdRecord",
    "ItemObservation",
    "SchemaConfig",
    "ScreeningReport",
    "ScreeningRules",
    "Sector",
    "SurveyDataset",
    "SynthConfig",
    "fsu_price_ratios",
    "generate",
    "household_share",
    "load_csv",
    "load_synthetic_spec",
    "make_ground_truth",
    "screen_items",
    "true_prevalence_probs",
    "unit_price",
    "write_csv",
]
