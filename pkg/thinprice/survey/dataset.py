"""
Metadata:
    Project: ThinPrice
    File Name: dataset.py
    File Path: thinprice/survey/dataset.py
    Module: Survey Dataset
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Household consumption records grouped into first stage units (FSUs).
    Each household carries its sector, state, size and monthly per capita
    expenditure (MPCE); each consumed item carries the quantity and value
    reported for the month. The price of an item is its unit value,
    value / quantity. Households that did not consume an item have no
    observation for it.

    Datasets are immutable and canonical: FSUs and households are kept in
    identifier order, so two files holding the same records in different
    row orders load to equal datasets.

Usage:
    >>> from thinprice.survey.dataset import load_csv, fsu_price_ratios
    >>> ds = load_csv("survey.csv")                      # doctest: +SKIP
    >>> fsu_price_ratios(ds, 101)[:2]                     # doctest: +SKIP
    [('F00001', 1.0), ('F00002', 0.8)]

Contents:
    Classes:
        - Sector: Rural / urban factor
        - HouseholdKey: (fsu_id, household_id) identifier
        - HouseholdRecord: Household metadata
        - ItemObservation: One household x item record
        - ItemFrame: Columnar numpy view of one item's observations
        - SchemaConfig: CSV column-name and sector-code mapping
        - SurveyDataset: Validated, indexed collection of records

    Functions:
        - load_csv: Ingest a CSV file through a SchemaConfig
        - write_csv: Write a dataset in the same schema
        - unit_price: value / quantity
        - fsu_price_ratios: min/max price ratio per FSU
        - household_share: Budget share of an item for a household

Dependencies:
    - numpy: Columnar item frames
    - pandas: CSV parsing and writing

Notes:
    Zero-consumption households are still households: a CSV row with empty
    item_code, quantity and value registers the household without an
    observation.
"""

from __future__ import annotations

import logging
import threading
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Union

import numpy as np
import pandas as pd

from thinprice.errors import (
    DataError,
    DuplicateRecordError,
    RowValidationError,
    SchemaError,
    UnknownHouseholdError,
    UnknownItemError,
)
from thinprice.precision.comparison import snap_unit_ratio
from thinprice.utils.io import atomic_write_text

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

#: Canonical field names, in CSV column order
FIELDS = (
    "fsu_id",
    "household_id",
    "sector",
    "state",
    "hh_size",
    "mpce",
    "item_code",
    "quantity",
    "value",
)


class Sector(str, Enum):
    """Survey sector factor."""

    RURAL = "rural"
    URBAN = "urban"


@dataclass(frozen=True, order=True)
class HouseholdKey:
    """Identifies a sample household; household_id is unique within its FSU."""

    fsu_id: str
    household_id: str

    def __str__(self) -> str:
        return f"{self.fsu_id}/{self.household_id}"


@dataclass(frozen=True)
class HouseholdRecord:
    """
    Household metadata.

    Attributes:
        key (HouseholdKey): Household identifier
        sector (Sector): Rural or urban
        state (str): State code
        hh_size (int): Persons in the household, >= 1
        mpce (float): Monthly per capita expenditure, > 0

    Raises:
        DataError: If hh_size < 1 or mpce <= 0
    """

    key: HouseholdKey
    sector: Sector
    state: str
    hh_size: int
    mpce: float

    def __post_init__(self) -> None:
        if self.hh_size < 1:
            raise DataError(f"{self.key}: hh_size must be >= 1, got {self.hh_size}")
        if not self.mpce > 0:
            raise DataError(f"{self.key}: mpce must be positive, got {self.mpce}")


@dataclass(frozen=True)
class ItemObservation:
    """
    Monthly consumption of one item by one household.

    Attributes:
        key (HouseholdKey): Consuming household
        item_code (int): Item identifier
        quantity (float): Item units per month, > 0
        value (float): Currency per month, > 0
    """

    key: HouseholdKey
    item_code: int
    quantity: float
    value: float

    def __post_init__(self) -> None:
        if not self.quantity > 0:
            raise DataError(f"{self.key} item {self.item_code}: non-positive quantity")
        if not self.value > 0:
            raise DataError(f"{self.key} item {self.item_code}: non-positive value")

    @property
    def unit_price(self) -> float:
        return unit_price(self)


def unit_price(obs: ItemObservation) -> float:
    """
    Unit value of an observation.

    Args:
        obs (ItemObservation): Valid observation (quantity > 0)

    Returns:
        float: value / quantity

    Examples:
        >>> unit_price(ItemObservation(HouseholdKey("F1", "H1"), 101, 2.0, 30.0))
        15.0

    Version: 0.1.0
    """
    return obs.value / obs.quantity


@dataclass(frozen=True, eq=False)
class ItemFrame:
    """
    Columnar view of the consuming observations of one item.

    Rows follow canonical (fsu_id, household_id) order, so the rows of one
    FSU are contiguous: group g spans rows fsu_starts[g] to
    fsu_starts[g] + fsu_counts[g].
    """

    item: int
    keys: tuple[HouseholdKey, ...]
    fsus: tuple[str, ...]
    fsu_codes: np.ndarray
    fsu_starts: np.ndarray
    fsu_counts: np.ndarray
    sector: np.ndarray
    state: np.ndarray
    hh_size: np.ndarray
    mpce: np.ndarray
    quantity: np.ndarray
    value: np.ndarray

    @property
    def price(self) -> np.ndarray:
        return self.value / self.quantity

    @property
    def n_rows(self) -> int:
        return len(self.keys)


@dataclass(frozen=True)
class SchemaConfig:
    """
    Maps canonical field names to CSV column names.

    Attributes:
        columns (Mapping[str, str]): field -> column overrides; fields not
            listed use their canonical name
        sector_codes (Mapping[str, str]): raw sector value -> "rural"/"urban";
            the labels themselves are always accepted
    """

    columns: Mapping[str, str] = field(default_factory=dict)
    sector_codes: Mapping[str, str] = field(
        default_factory=lambda: {"1": Sector.RURAL.value, "2": Sector.URBAN.value}
    )

    def column(self, name: str) -> str:
        return self.columns.get(name, name)

    def parse_sector(self, raw: str) -> Optional[Sector]:
        label = self.sector_codes.get(raw, raw).strip().lower()
        try:
            return Sector(label)
        except ValueError:
            return None

    def to_dict(self) -> dict[str, Any]:
        return {"columns": dict(self.columns), "sector_codes": dict(self.sector_codes)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SchemaConfig:
        if not isinstance(data, Mapping):
            raise DataError(f"schema must be an object, got {data!r}")
        for name in ("columns", "sector_codes"):
            if not isinstance(data.get(name, {}), Mapping):
                raise DataError(f"schema.{name} must be an object, got {data[name]!r}")
        unknown = set(data) - {"columns", "sector_codes"}
        if unknown:
            raise DataError(f"Unknown schema keys: {sorted(unknown)}")
        columns = dict(data.get("columns", {}))
        bad = set(columns) - set(FIELDS)
        if bad:
            raise DataError(f"Schema maps unknown fields: {sorted(bad)}")
        default = cls()
        return cls(
            columns=columns,
            sector_codes=dict(data.get("sector_codes", default.sector_codes)),
        )


FsuIndex = Mapping[int, Mapping[str, tuple[HouseholdKey, ...]]]


def build_fsu_index(
    observations: Iterable[ItemObservation],
) -> dict[int, dict[str, tuple[HouseholdKey, ...]]]:
    """Per-item map fsu_id -> consuming household keys, both in canonical order."""
    grouped: dict[int, dict[str, list[HouseholdKey]]] = {}
    for obs in sorted(observations, key=lambda o: (o.item_code, o.key)):
        grouped.setdefault(obs.item_code, {}).setdefault(obs.key.fsu_id, []).append(obs.key)
    return {
        item: {fsu: tuple(keys) for fsu, keys in fsus.items()} for item, fsus in grouped.items()
    }


class SurveyDataset:
    """
    Validated, immutable survey dataset.

    Detailed Description:
        Holds households and item observations in canonical order and an
        index of consuming households per item and FSU. Construction
        checks every invariant; once built, the dataset is safe to read
        from any number of threads.

    Args:
        households: Household records
        observations: Item observations, each for a listed household
        rejections: Row-level validation failures collected at load time

    Raises:
        DuplicateRecordError: Repeated household key or (household, item)
        DataError: Observation for an unknown household, or an FSU whose
            households disagree on sector or state

    Version: 0.1.0
    """

    def __init__(
        self,
        households: Iterable[HouseholdRecord],
        observations: Iterable[ItemObservation],
        rejections: Iterable[RowValidationError] = (),
    ) -> None:
        records = sorted(households, key=lambda h: h.key)
        by_key: dict[HouseholdKey, HouseholdRecord] = {}
        for rec in records:
            if rec.key in by_key:
                raise DuplicateRecordError(f"Duplicate household {rec.key}")
            by_key[rec.key] = rec

        fsu_meta: dict[str, tuple[Sector, str]] = {}
        fsu_members: dict[str, list[HouseholdRecord]] = {}
        for rec in records:
            meta = (rec.sector, rec.state)
            seen = fsu_meta.setdefault(rec.key.fsu_id, meta)
            if seen != meta:
                raise DataError(
                    f"FSU {rec.key.fsu_id}: households disagree on sector/state "
                    f"({seen[0].value}/{seen[1]} vs {meta[0].value}/{meta[1]})"
                )
            fsu_members.setdefault(rec.key.fsu_id, []).append(rec)

        obs_sorted = sorted(observations, key=lambda o: (o.key, o.item_code))
        seen_pairs: set[tuple[HouseholdKey, int]] = set()
        for obs in obs_sorted:
            if obs.key not in by_key:
                raise DataError(f"Observation for unknown household {obs.key}")
            pair = (obs.key, obs.item_code)
            if pair in seen_pairs:
                raise DuplicateRecordError(
                    f"Duplicate record for household {obs.key}, item {obs.item_code}"
                )
            seen_pairs.add(pair)

        self._households = tuple(records)
        self._by_key = MappingProxyType(by_key)
        self._fsu_members = MappingProxyType({k: tuple(v) for k, v in fsu_members.items()})
        self._observations = tuple(obs_sorted)
        self._obs_by_pair = MappingProxyType({(o.key, o.item_code): o for o in obs_sorted})
        self._fsu_index = self._freeze_index(build_fsu_index(obs_sorted))
        self._rejections = tuple(rejections)
        self._frames: dict[int, ItemFrame] = {}
        self._frames_lock = threading.Lock()

    @staticmethod
    def _freeze_index(index: Mapping[int, Mapping[str, tuple[HouseholdKey, ...]]]) -> FsuIndex:
        return MappingProxyType(
            {item: MappingProxyType(dict(fsus)) for item, fsus in index.items()}
        )

    # ----- read-only views -----

    @property
    def households(self) -> tuple[HouseholdRecord, ...]:
        return self._households

    @property
    def observations(self) -> tuple[ItemObservation, ...]:
        return self._observations

    @property
    def fsu_index(self) -> FsuIndex:
        return self._fsu_index

    @property
    def rejections(self) -> tuple[RowValidationError, ...]:
        return self._rejections

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(sorted(self._fsu_index))

    @property
    def fsu_ids(self) -> tuple[str, ...]:
        return tuple(self._fsu_members)

    @property
    def sector_levels(self) -> tuple[str, ...]:
        return tuple(sorted({h.sector.value for h in self._households}))

    @property
    def state_levels(self) -> tuple[str, ...]:
        return tuple(sorted({h.state for h in self._households}))

    # ----- lookups -----

    def has_item(self, item: int) -> bool:
        return item in self._fsu_index

    def require_item(self, item: int) -> None:
        if item not in self._fsu_index:
            raise UnknownItemError(item)

    def household(self, key: HouseholdKey) -> HouseholdRecord:
        try:
            return self._by_key[key]
        except KeyError:
            raise UnknownHouseholdError(f"Household {key} not present in dataset") from None

    def households_in_fsu(self, fsu_id: str) -> tuple[HouseholdRecord, ...]:
        return self._fsu_members.get(fsu_id, ())

    def observation(self, key: HouseholdKey, item: int) -> Optional[ItemObservation]:
        return self._obs_by_pair.get((key, item))

    def observations_for(self, item: int) -> tuple[ItemObservation, ...]:
        self.require_item(item)
        return tuple(o for o in self._observations if o.item_code == item)

    def item_frame(self, item: int) -> ItemFrame:
        """
        Columnar view of one item's consuming observations (cached).

        Raises:
            UnknownItemError: If the item has no observation
        """
        self.require_item(item)
        with self._frames_lock:
            frame = self._frames.get(item)
            if frame is None:
                frame = self._build_frame(item)
                self._frames[item] = frame
        return frame

    def _build_frame(self, item: int) -> ItemFrame:
        keys: list[HouseholdKey] = []
        fsus: list[str] = []
        starts: list[int] = []
        for fsu_id, members in self._fsu_index[item].items():
            starts.append(len(keys))
            fsus.append(fsu_id)
            keys.extend(members)
        obs = [self._obs_by_pair[(k, item)] for k in keys]
        recs = [self._by_key[k] for k in keys]
        counts = np.diff(np.append(starts, len(keys))).astype(np.int64)
        return ItemFrame(
            item=item,
            keys=tuple(keys),
            fsus=tuple(fsus),
            fsu_codes=np.repeat(np.arange(len(fsus), dtype=np.int64), counts),
            fsu_starts=np.asarray(starts, dtype=np.int64),
            fsu_counts=counts,
            sector=np.array([r.sector.value for r in recs], dtype=object),
            state=np.array([r.state for r in recs], dtype=object),
            hh_size=np.array([r.hh_size for r in recs], dtype=float),
            mpce=np.array([r.mpce for r in recs], dtype=float),
            quantity=np.array([o.quantity for o in obs], dtype=float),
            value=np.array([o.value for o in obs], dtype=float),
        )

    # ----- index consistency -----

    def rebuild_fsu_index(self) -> dict[int, dict[str, tuple[HouseholdKey, ...]]]:
        return build_fsu_index(self._observations)

    def verify_index(self) -> bool:
        """True iff rebuilding the FSU index from observations reproduces the stored one."""
        rebuilt = self.rebuild_fsu_index()
        stored = {item: dict(fsus) for item, fsus in self._fsu_index.items()}
        return rebuilt == stored

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SurveyDataset):
            return NotImplemented
        return self._households == other._households and self._observations == other._observations

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"SurveyDataset(households={len(self._households)}, "
            f"observations={len(self._observations)}, fsus={len(self._fsu_members)}, "
            f"items={list(self.items)})"
        )


# ===== CSV INGESTION =====


def _to_numbers(column: pd.Series) -> pd.Series:
    """Floats of a text column; NaN where empty, malformed or non-finite."""
    values = pd.to_numeric(column, errors="coerce").astype(float)
    return values.where(np.isfinite(values))


def _assign(reasons: pd.Series, mask: pd.Series, reason: str) -> None:
    """Record reason for rows that fail mask and have no earlier reason."""
    target = mask & (reasons == "")
    reasons[target] = reason


def load_csv(path: PathLike, schema_config: Optional[SchemaConfig] = None) -> SurveyDataset:
    """
    Load and validate a household consumption CSV.

    Args:
        path (PathLike): UTF-8 CSV with a header row
        schema_config (SchemaConfig, optional): Column mapping; defaults to
            canonical names

    Returns:
        SurveyDataset: Validated dataset; dropped rows are listed in
        dataset.rejections with their line numbers and reasons

    Raises:
        FileNotFoundError: If path does not exist
        SchemaError: If a mapped column is missing
        DuplicateRecordError: If an (fsu, household, item) triple repeats
        DataError: If a household's attributes conflict across rows or an
            FSU mixes sectors or states

    Examples:
        >>> ds = load_csv("survey.csv")                 # doctest: +SKIP
        >>> len(ds.observations)                         # doctest: +SKIP
        3

    Version: 0.1.0
    """
    schema = schema_config or SchemaConfig()
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Input file not found: {source}")

    raw = pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8")
    rename: dict[str, str] = {}
    for name in FIELDS:
        column = schema.column(name)
        if column not in raw.columns:
            raise SchemaError(name, column)
        rename[column] = name
    df = raw.rename(columns=rename)[list(FIELDS)].apply(lambda s: s.str.strip())
    df.index = pd.RangeIndex(2, len(df) + 2)  # header is line 1

    numeric = {
        name: _to_numbers(df[name])
        for name in ("hh_size", "mpce", "item_code", "quantity", "value")
    }
    sectors = df["sector"].map(schema.parse_sector)
    household_only = (df["item_code"] == "") & (df["quantity"] == "") & (df["value"] == "")

    reasons = pd.Series("", index=df.index, dtype=object)
    _assign(reasons, (df["fsu_id"] == "") | (df["household_id"] == ""), "missing identifier")
    _assign(reasons, sectors.isna(), "invalid sector")
    _assign(reasons, df["state"] == "", "missing state")
    _assign(reasons, numeric["hh_size"].isna(), "unparseable hh_size")
    _assign(reasons, numeric["hh_size"] % 1 != 0, "non-integer hh_size")
    _assign(reasons, numeric["hh_size"] <= 0, "non-positive hh_size")
    _assign(reasons, numeric["mpce"].isna(), "unparseable mpce")
    _assign(reasons, numeric["mpce"] <= 0, "non-positive mpce")
    is_obs = ~household_only
    bad_code = numeric["item_code"].isna() | (numeric["item_code"] % 1 != 0)
    _assign(reasons, is_obs & bad_code, "unparseable item_code")
    _assign(reasons, is_obs & numeric["quantity"].isna(), "unparseable quantity")
    _assign(reasons, is_obs & (numeric["quantity"] <= 0), "non-positive quantity")
    _assign(reasons, is_obs & numeric["value"].isna(), "unparseable value")
    _assign(reasons, is_obs & (numeric["value"] <= 0), "non-positive value")

    rejected = reasons != ""
    rejections = [
        RowValidationError(int(line), str(reasons[line]))
        for line in df.index[rejected.to_numpy()]
    ]
    if rejections:
        summary = Counter(r.reason for r in rejections)
        for reason, count in sorted(summary.items()):
            logger.warning("%s: dropped %d row(s): %s", source.name, count, reason)

    valid = ~rejected
    obs_rows = valid & is_obs
    triples = pd.DataFrame(
        {"fsu_id": df["fsu_id"], "household_id": df["household_id"], "item": numeric["item_code"]}
    )[obs_rows]
    dup = triples.duplicated(keep=False)
    if dup.any():
        first = triples[dup].iloc[0]
        lines = ", ".join(str(i) for i in triples.index[dup.to_numpy()][:5])
        raise DuplicateRecordError(
            f"Duplicate (fsu, household, item) = ({first['fsu_id']}, {first['household_id']}, "
            f"{int(first['item'])}) on lines {lines}"
        )

    households: dict[HouseholdKey, HouseholdRecord] = {}
    observations: list[ItemObservation] = []
    for line in df.index[valid.to_numpy()]:
        key = HouseholdKey(df.at[line, "fsu_id"], df.at[line, "household_id"])
        record = HouseholdRecord(
            key=key,
            sector=sectors[line],
            state=df.at[line, "state"],
            hh_size=int(numeric["hh_size"][line]),
            mpce=float(numeric["mpce"][line]),
        )
        existing = households.setdefault(key, record)
        if existing != record:
            raise DataError(f"line {line}: conflicting attributes for household {key}")
        if not household_only[line]:
            observations.append(
                ItemObservation(
                    key=key,
                    item_code=int(numeric["item_code"][line]),
                    quantity=float(numeric["quantity"][line]),
                    value=float(numeric["value"][line]),
                )
            )

    dataset = SurveyDataset(households.values(), observations, rejections)
    logger.info(
        "Loaded %s: %d households, %d observations, %d rejected rows",
        source.name,
        len(dataset.households),
        len(dataset.observations),
        len(rejections),
    )
    return dataset


def write_csv(
    ds: SurveyDataset, path: PathLike, schema_config: Optional[SchemaConfig] = None
) -> Path:
    """
    Write a dataset in the schema load_csv reads.

    Households without any observation are written as one row with empty
    item_code, quantity and value. Floats use shortest round-trip repr, so
    load_csv(write_csv(ds)) == ds.
    """
    schema = schema_config or SchemaConfig()
    rows: list[dict[str, Any]] = []
    by_key: dict[HouseholdKey, list[ItemObservation]] = {}
    for obs in ds.observations:
        by_key.setdefault(obs.key, []).append(obs)
    for rec in ds.households:
        base = {
            "fsu_id": rec.key.fsu_id,
            "household_id": rec.key.household_id,
            "sector": rec.sector.value,
            "state": rec.state,
            "hh_size": str(rec.hh_size),
            "mpce": repr(rec.mpce),
        }
        consumed = by_key.get(rec.key, [])
        if not consumed:
            rows.append({**base, "item_code": "", "quantity": "", "value": ""})
        for obs in consumed:
            rows.append(
                {
                    **base,
                    "item_code": str(obs.item_code),
                    "quantity": repr(obs.quantity),
                    "value": repr(obs.value),
                }
            )
    frame = pd.DataFrame(rows, columns=list(FIELDS))
    frame.columns = [schema.column(name) for name in FIELDS]
    return atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


# ===== PRICES AND SHARES =====


def fsu_price_ratios(ds: SurveyDataset, item: int) -> list[tuple[str, float]]:
    """
    Ratio of minimum to maximum unit price within each FSU.

    Args:
        ds (SurveyDataset): Dataset
        item (int): Item code

    Returns:
        list[tuple[str, float]]: (fsu_id, ratio) for every FSU with at
        least two consuming households, in FSU order; ratio in (0, 1]

    Raises:
        UnknownItemError: If item is absent

    Examples:
        >>> fsu_price_ratios(ds, 101)                  # doctest: +SKIP
        [('F1', 1.0), ('F2', 0.8)]

    Notes:
        Ratios within 1e-12 of 1 are reported as exactly 1.0: prices
        rebuilt as value / quantity carry ulp-level noise.

    Version: 0.1.0
    """
    frame = ds.item_frame(item)
    multi = frame.fsu_counts >= 2
    if not multi.any():
        return []
    prices = frame.price
    lows = np.minimum.reduceat(prices, frame.fsu_starts)
    highs = np.maximum.reduceat(prices, frame.fsu_starts)
    return [
        (frame.fsus[g], snap_unit_ratio(float(lows[g] / highs[g])))
        for g in np.flatnonzero(multi)
    ]


def household_share(
    ds: SurveyDataset,
    key: HouseholdKey,
    item: int,
    value_override: Optional[float] = None,
) -> float:
    """
    Budget share: per capita expenditure on the item divided by MPCE.

    Args:
        ds (SurveyDataset): Dataset
        key (HouseholdKey): Household
        item (int): Item code
        value_override (float, optional): Value to use instead of the
            recorded one (model-predicted shares); must be >= 0

    Returns:
        float: (value / hh_size) / mpce

    Raises:
        UnknownHouseholdError: If the household is absent
        DataError: If no override is given and the household does not
            consume the item, or the override is negative

    Examples:
        >>> household_share(ds, key, 101)              # doctest: +SKIP
        0.05

    Version: 0.1.0
    """
    record = ds.household(key)
    if value_override is None:
        obs = ds.observation(key, item)
        if obs is None:
            raise DataError(f"Household {key} does not consume item {item}")
        value = obs.value
    else:
        if value_override < 0:
            raise DataError(f"value_override must be non-negative, got {value_override}")
        value = float(value_override)
    return (value / record.hh_size) / record.mpce
