"""
Metadata:
    Project: ThinPrice
    File Name: sampling.py
    File Path: thinprice/core/sampling.py
    Module: Thin Price Sampling
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    The thin sampling scheme: in every FSU one consuming household is
    picked uniformly at random and its unit price P* stands in for the
    price of every household in that FSU. Also derives the per-repetition
    seeds of a repeated study from a single master seed.

    Only households consuming the item can be selected (a non-consumer has
    no unit price) and FSUs without a consumer are left out.

Contents:
    Classes:
        - ThinSampleAssignment: FSU -> selected household for one draw
        - StarPricedObservation: Observation with its substituted price
        - RepetitionPlan: Master seed, repetition count and salt

    Functions:
        - select_rows: One uniformly drawn row per FSU group of an ItemFrame
        - star_prices: P* and log(P*/P) per row for a selection
        - draw_thin_sample: Seeded ThinSampleAssignment
        - assign_star_prices: StarPricedObservation per consuming observation
        - repetition_seeds: Collision-checked derived seeds
        - write_selection_audit: CSV of (fsu_id, selected_household_id)

Seeding:
    Repetition r uses the first 64-bit word of
    SeedSequence(master_seed, spawn_key=(salt, r)), so it depends only on
    (master_seed, salt, r) and never on execution order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np
import pandas as pd

from thinprice.errors import ConfigError, DatasetMismatchError, SeedCollisionError
from thinprice.precision import PRICE_RTOL
from thinprice.survey.dataset import HouseholdKey, ItemFrame, ItemObservation, SurveyDataset
from thinprice.utils.io import PathLike, atomic_write_text

logger = logging.getLogger(__name__)

DEFAULT_REPETITIONS = 1000


@dataclass(frozen=True)
class ThinSampleAssignment:
    """
    One thin-sample draw for an item.

    Attributes:
        item (int): Item code
        selection (Mapping[str, HouseholdKey]): fsu_id -> selected
            household, one entry per FSU with a consuming household
        seed (int): Seed the draw was made with
    """

    item: int
    selection: Mapping[str, HouseholdKey]
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "selection", MappingProxyType(dict(self.selection)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThinSampleAssignment):
            return NotImplemented
        mine = (self.item, dict(self.selection), self.seed)
        return mine == (other.item, dict(other.selection), other.seed)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class StarPricedObservation:
    """An observation together with its actual price P and substituted price P*."""

    base: ItemObservation
    actual_price: float
    star_price: float
    log_price_ratio: float

    @property
    def key(self) -> HouseholdKey:
        return self.base.key


@dataclass(frozen=True)
class RepetitionPlan:
    """
    Seeding plan of a repeated study.

    Attributes:
        master_seed (int): Non-negative 64-bit master seed
        repetitions (int): Number of repetitions R (default 1000)
        salt (int): Extra seed-derivation key; change it to regenerate
            after a seed collision

    Raises:
        ConfigError: If repetitions < 1 or a seed is negative
    """

    master_seed: int
    repetitions: int = DEFAULT_REPETITIONS
    salt: int = 0

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.master_seed < 0 or self.master_seed >= 2**64:
            raise ConfigError(
                f"master_seed must be a 64-bit non-negative integer, got {self.master_seed}"
            )
        if self.salt < 0:
            raise ConfigError(f"salt must be >= 0, got {self.salt}")

    def to_dict(self) -> dict[str, Any]:
        return {"master_seed": self.master_seed, "repetitions": self.repetitions, "salt": self.salt}


def select_rows(frame: ItemFrame, rng: np.random.Generator) -> np.ndarray:
    """
    Draw one row per FSU group, uniformly within the group.

    Returns:
        np.ndarray: Row indices into frame, one per FSU, in FSU order
    """
    return frame.fsu_starts + rng.integers(0, frame.fsu_counts)


def star_prices(frame: ItemFrame, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Substituted price and log price ratio for every row of frame.

    Args:
        frame (ItemFrame): Columnar item view
        rows (np.ndarray): Selected row per FSU (from select_rows)

    Returns:
        tuple: (star, log_ratio); log_ratio entries within 1e-12 of zero
        are set to exactly 0.0
    """
    price = frame.price
    star = price[rows][frame.fsu_codes]
    log_ratio = np.log(star) - np.log(price)
    log_ratio[np.abs(log_ratio) <= PRICE_RTOL] = 0.0
    return star, log_ratio


def draw_thin_sample(ds: SurveyDataset, item: int, seed: int) -> ThinSampleAssignment:
    """
    Select one consuming household per FSU uniformly at random.

    Args:
        ds (SurveyDataset): Dataset
        item (int): Item code
        seed (int): Non-negative seed; the draw is a pure function of it

    Returns:
        ThinSampleAssignment: Selection for every FSU with a consumer

    Raises:
        UnknownItemError: If the item has no observation

    Examples:
        >>> a = draw_thin_sample(ds, 101, seed=42)      # doctest: +SKIP
        >>> a == draw_thin_sample(ds, 101, seed=42)     # doctest: +SKIP
        True

    Version: 0.1.0
    """
    frame = ds.item_frame(item)
    rows = select_rows(frame, np.random.default_rng(int(seed)))
    selection = {frame.fsus[g]: frame.keys[row] for g, row in enumerate(rows)}
    return ThinSampleAssignment(item=item, selection=selection, seed=int(seed))


def _selected_rows(frame: ItemFrame, a: ThinSampleAssignment) -> np.ndarray:
    if set(a.selection) != set(frame.fsus):
        missing = sorted(set(frame.fsus) - set(a.selection))
        extra = sorted(set(a.selection) - set(frame.fsus))
        raise DatasetMismatchError(
            f"Assignment for item {a.item} does not cover the item's FSUs "
            f"(missing {missing[:5]}, unexpected {extra[:5]})"
        )
    position = {key: row for row, key in enumerate(frame.keys)}
    rows = np.empty(len(frame.fsus), dtype=np.int64)
    for g, fsu in enumerate(frame.fsus):
        key = a.selection[fsu]
        row = position.get(key)
        if row is None or key.fsu_id != fsu:
            raise DatasetMismatchError(
                f"Selected household {key} is not a consumer of item {a.item} in FSU {fsu}"
            )
        rows[g] = row
    return rows


def assign_star_prices(ds: SurveyDataset, a: ThinSampleAssignment) -> list[StarPricedObservation]:
    """
    Attach the selected household's unit price to every observation of its FSU.

    Args:
        ds (SurveyDataset): Dataset the assignment was drawn from
        a (ThinSampleAssignment): Selection

    Returns:
        list[StarPricedObservation]: One per consuming observation, in
        canonical (fsu_id, household_id) order

    Raises:
        DatasetMismatchError: If the assignment does not match the dataset

    Examples:
        >>> star = assign_star_prices(ds, draw_thin_sample(ds, 101, 1))  # doctest: +SKIP
        >>> len(star) == len(ds.observations_for(101))                   # doctest: +SKIP
        True
    """
    frame = ds.item_frame(a.item)
    rows = _selected_rows(frame, a)
    star, log_ratio = star_prices(frame, rows)
    price = frame.price
    return [
        StarPricedObservation(
            base=ds.observation(key, a.item),  # type: ignore[arg-type]
            actual_price=float(price[i]),
            star_price=float(star[i]),
            log_price_ratio=float(log_ratio[i]),
        )
        for i, key in enumerate(frame.keys)
    ]


def repetition_seeds(plan: RepetitionPlan) -> np.ndarray:
    """
    Derived seed for every repetition of the plan.

    Returns:
        np.ndarray: uint64 vector of length plan.repetitions

    Raises:
        SeedCollisionError: If two repetitions derive the same seed
    """
    seeds = np.fromiter(
        (
            np.random.SeedSequence(plan.master_seed, spawn_key=(plan.salt, r))
            .generate_state(1, np.uint64)[0]
            for r in range(plan.repetitions)
        ),
        dtype=np.uint64,
        count=plan.repetitions,
    )
    if np.unique(seeds).size != seeds.size:
        raise SeedCollisionError(
            f"Derived seeds collide for master_seed={plan.master_seed}, salt={plan.salt}; "
            "rerun with a different salt"
        )
    return seeds


def write_selection_audit(path: PathLike, assignment: ThinSampleAssignment) -> Path:
    """Write (fsu_id, selected_household_id) rows, sorted by FSU, as CSV."""
    frame = pd.DataFrame(
        [(fsu, key.household_id) for fsu, key in sorted(assignment.selection.items())],
        columns=["fsu_id", "selected_household_id"],
    )
    return atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))
