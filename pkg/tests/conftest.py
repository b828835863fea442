"""Shared fixtures: a hand-built toy survey and small synthetic surveys."""

from pathlib import Path

import pytest

from thinprice.survey.dataset import (
    FIELDS,
    HouseholdKey,
    HouseholdRecord,
    ItemObservation,
    Sector,
    SurveyDataset,
)
from thinprice.survey.synth import SynthConfig, generate, make_ground_truth


def household(fsu, hh, sector=Sector.RURAL, state="01", size=4, mpce=1000.0):
    return HouseholdRecord(HouseholdKey(fsu, hh), sector, state, size, mpce)


def observation(fsu, hh, item=101, quantity=2.0, value=30.0):
    return ItemObservation(HouseholdKey(fsu, hh), item, quantity, value)


@pytest.fixture
def toy_dataset():
    """
    Three FSUs, item 101 and item 202.

    F1: four households, three consume 101 at prices 10, 10, 20
    F2: two households, both consume 101 at price 15
    F3: one household, consumes only 202
    """
    households = [
        household("F1", "H1"),
        household("F1", "H2"),
        household("F1", "H3"),
        household("F1", "H4"),
        household("F2", "H1", Sector.URBAN, "02", 3, 1500.0),
        household("F2", "H2", Sector.URBAN, "02", 2, 800.0),
        household("F3", "H1", Sector.RURAL, "02", 5, 600.0),
    ]
    observations = [
        observation("F1", "H1", quantity=2.0, value=20.0),
        observation("F1", "H2", quantity=3.0, value=30.0),
        observation("F1", "H3", quantity=1.0, value=20.0),
        observation("F2", "H1", quantity=4.0, value=60.0),
        observation("F2", "H2", quantity=2.0, value=30.0),
        observation("F3", "H1", item=202, quantity=1.0, value=5.0),
    ]
    return SurveyDataset(households, observations)


def synthetic(seed=11, **overrides):
    """Synthetic survey and its ground truth with small defaults."""
    params = {"n_fsu": 120, "households_per_fsu": (6, 8)}
    params.update(overrides)
    cfg = SynthConfig(**params)
    truth = make_ground_truth(cfg, seed)
    return generate(cfg, truth, seed), cfg, truth


@pytest.fixture
def small_synthetic():
    ds, _, _ = synthetic()
    return ds


def write_rows(path: Path, rows, header=FIELDS):
    lines = [",".join(header)] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
