"""
Metadata:
    Project: ThinPrice
    File Name: screening.py
    File Path: thinprice/survey/screening.py
    Module: Item Screening
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Decides which items are fit for thin price sampling. An item whose
    within-FSU price ratios (min / max) pile up well below 1 bundles
    heterogeneous goods under one code ("fish, prawn"), so one household's
    price says little about its neighbours'. Items whose quantity unit
    varies between households (cups of tea, meals) are excluded outright,
    as are manually listed items.

Usage:
    >>> from thinprice.survey.screening import ScreeningRules, screen_items
    >>> report = screen_items(ds, ScreeningRules())     # doctest: +SKIP
    >>> report.included_items                            # doctest: +SKIP
    (101, 172)

Contents:
    Classes:
        - ScreeningRules: Thresholds and exclusion lists
        - ExclusionReason: heterogeneous-price | variable-unit | manual
        - ItemScreening: Histogram and verdict for one item
        - ScreeningReport: Verdicts for every item

    Functions:
        - screen_items: Apply rules to every item of a dataset

Rule:
    Exclude as heterogeneous iff the fraction of FSU ratios below
    ratio_threshold exceeds mass_threshold. Defaults t = 0.5, m = 0.2.

Notes:
    Histogram bins are equal-width on [0, 1]; numpy's convention applies
    (each bin half-open on the right except the last, which holds 1.0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional

import numpy as np

from thinprice.errors import ConfigError
from thinprice.survey.dataset import SurveyDataset, fsu_price_ratios

logger = logging.getLogger(__name__)


class ExclusionReason(str, Enum):
    HETEROGENEOUS_PRICE = "heterogeneous-price"
    VARIABLE_UNIT = "variable-unit"
    MANUAL = "manual"


@dataclass(frozen=True)
class ScreeningRules:
    """
    Screening configuration.

    Attributes:
        ratio_threshold (float): t in (0, 1); ratios below t count as mass
        mass_threshold (float): m in (0, 1); maximum tolerated mass below t
        variable_unit_items (frozenset[int]): Excluded unconditionally
        manual_exclusions (frozenset[int]): Excluded unconditionally
        bins (int): Histogram bins on [0, 1] (default 20)

    Raises:
        ConfigError: If a threshold lies outside (0, 1) or bins < 1
    """

    ratio_threshold: float = 0.5
    mass_threshold: float = 0.2
    variable_unit_items: frozenset[int] = field(default_factory=frozenset)
    manual_exclusions: frozenset[int] = field(default_factory=frozenset)
    bins: int = 20

    def __post_init__(self) -> None:
        for name in ("ratio_threshold", "mass_threshold"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"screening.{name} must lie in (0, 1), got {value}")
        if self.bins < 1:
            raise ConfigError(f"screening.bins must be >= 1, got {self.bins}")
        object.__setattr__(self, "variable_unit_items", frozenset(self.variable_unit_items))
        object.__setattr__(self, "manual_exclusions", frozenset(self.manual_exclusions))

    def to_dict(self) -> dict[str, Any]:
        return {
            "ratio_threshold": self.ratio_threshold,
            "mass_threshold": self.mass_threshold,
            "variable_unit_items": sorted(self.variable_unit_items),
            "manual_exclusions": sorted(self.manual_exclusions),
            "bins": self.bins,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ScreeningRules:
        """Parse the "screening" config block; bad values raise ConfigError naming the key."""
        if not isinstance(data, Mapping):
            raise ConfigError(f"screening must be an object, got {data!r}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown screening keys: {sorted(unknown)}")
        kwargs = dict(data)
        for name in ("ratio_threshold", "mass_threshold"):
            value = kwargs.get(name, 0.5)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"screening.{name} must be a number, got {value!r}")
        bins = kwargs.get("bins", 1)
        if isinstance(bins, bool) or not isinstance(bins, int):
            raise ConfigError(f"screening.bins must be an integer, got {bins!r}")
        for name in ("variable_unit_items", "manual_exclusions"):
            if name in kwargs:
                codes = kwargs[name]
                if not isinstance(codes, (list, tuple, set, frozenset)) or not all(
                    isinstance(v, int) and not isinstance(v, bool) for v in codes
                ):
                    raise ConfigError(
                        f"screening.{name} must be a list of integer codes, got {codes!r}"
                    )
                kwargs[name] = frozenset(codes)
        return cls(**kwargs)


@dataclass(frozen=True)
class ItemScreening:
    """Price-ratio histogram and verdict for one item."""

    item: int
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    n_ratios: int
    mass_below: float
    included: bool
    reason: Optional[ExclusionReason] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "item": self.item,
            "bin_edges": list(self.bin_edges),
            "counts": list(self.counts),
            "n_ratios": self.n_ratios,
            "mass_below": self.mass_below,
            "included": self.included,
            "reason": self.reason.value if self.reason else None,
        }


@dataclass(frozen=True)
class ScreeningReport:
    """Verdicts for every item, keyed by item code in ascending order."""

    rules: ScreeningRules
    items: Mapping[int, ItemScreening]

    @property
    def included_items(self) -> tuple[int, ...]:
        return tuple(item for item, res in self.items.items() if res.included)

    @property
    def excluded_items(self) -> tuple[int, ...]:
        return tuple(item for item, res in self.items.items() if not res.included)

    def histogram_rows(self) -> list[tuple[int, float, float, int]]:
        """Flat (item, bin_lo, bin_hi, count) rows."""
        rows: list[tuple[int, float, float, int]] = []
        for item, res in self.items.items():
            edges = res.bin_edges
            for b, count in enumerate(res.counts):
                rows.append((item, edges[b], edges[b + 1], count))
        return rows

    def to_dict(self) -> dict[str, Any]:
        return {
            "rules": self.rules.to_dict(),
            "items": [res.to_dict() for res in self.items.values()],
        }


def _screen_one(ds: SurveyDataset, item: int, rules: ScreeningRules) -> ItemScreening:
    ratios = np.array([r for _, r in fsu_price_ratios(ds, item)], dtype=float)
    counts, edges = np.histogram(ratios, bins=rules.bins, range=(0.0, 1.0))
    mass = float(np.mean(ratios < rules.ratio_threshold)) if ratios.size else 0.0

    reason: Optional[ExclusionReason] = None
    if item in rules.variable_unit_items:
        reason = ExclusionReason.VARIABLE_UNIT
    elif item in rules.manual_exclusions:
        reason = ExclusionReason.MANUAL
    elif mass > rules.mass_threshold:
        reason = ExclusionReason.HETEROGENEOUS_PRICE

    return ItemScreening(
        item=item,
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        n_ratios=int(ratios.size),
        mass_below=mass,
        included=reason is None,
        reason=reason,
    )


def screen_items(ds: SurveyDataset, rules: ScreeningRules) -> ScreeningReport:
    """
    Screen every item in the dataset.

    Args:
        ds (SurveyDataset): Dataset
        rules (ScreeningRules): Thresholds and exclusion lists

    Returns:
        ScreeningReport: Deterministic in (ds, rules)

    Examples:
        >>> report = screen_items(ds, ScreeningRules(ratio_threshold=0.5))  # doctest: +SKIP
        >>> report.items[191].reason                                        # doctest: +SKIP
        <ExclusionReason.HETEROGENEOUS_PRICE: 'heterogeneous-price'>

    Version: 0.1.0
    """
    results = {item: _screen_one(ds, item, rules) for item in ds.items}
    for item, res in results.items():
        if not res.included:
            logger.info(
                "Item %d excluded (%s): %.1f%% of %d FSU ratios below %.2f",
                item,
                res.reason.value if res.reason else "?",
                100.0 * res.mass_below,
                res.n_ratios,
                rules.ratio_threshold,
            )
    return ScreeningReport(rules=rules, items=results)
