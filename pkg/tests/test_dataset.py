"""Tests for survey records, CSV ingestion, price ratios and shares."""

import numpy as np
import pytest
from conftest import household, observation, synthetic, write_rows

from thinprice.errors import (
    DataError,
    DuplicateRecordError,
    SchemaError,
    UnknownHouseholdError,
    UnknownItemError,
)
from thinprice.survey.dataset import (
    HouseholdKey,
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


class TestUnitPrice:
    def test_value_over_quantity(self):
        assert unit_price(ItemObservation(HouseholdKey("F", "H"), 1, 2.0, 30.0)) == 15.0

    def test_identity(self):
        assert unit_price(ItemObservation(HouseholdKey("F", "H"), 1, 7.5, 7.5)) == 1.0

    def test_round_trip(self):
        obs = ItemObservation(HouseholdKey("F", "H"), 1, 3.0, 100.0)
        price = unit_price(obs)
        assert price == pytest.approx(33.333333333, rel=1e-9)
        assert price * obs.quantity == pytest.approx(obs.value, rel=1e-9)

    @pytest.mark.parametrize("quantity,value", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
    def test_non_positive_rejected(self, quantity, value):
        with pytest.raises(DataError):
            ItemObservation(HouseholdKey("F", "H"), 1, quantity, value)


class TestHouseholdRecord:
    def test_zero_size_rejected(self):
        with pytest.raises(DataError):
            household("F1", "H1", size=0)

    def test_non_positive_mpce_rejected(self):
        with pytest.raises(DataError):
            household("F1", "H1", mpce=0.0)


class TestSurveyDataset:
    def test_index_consistent(self, toy_dataset):
        assert toy_dataset.verify_index()
        assert toy_dataset.items == (101, 202)
        assert [k.household_id for k in toy_dataset.fsu_index[101]["F1"]] == ["H1", "H2", "H3"]
        assert "F3" not in toy_dataset.fsu_index[101]

    def test_permutation_gives_equal_dataset(self, toy_dataset):
        shuffled = SurveyDataset(
            list(reversed(toy_dataset.households)), list(reversed(toy_dataset.observations))
        )
        assert shuffled == toy_dataset

    def test_duplicate_household(self):
        with pytest.raises(DuplicateRecordError):
            SurveyDataset([household("F1", "H1"), household("F1", "H1")], [])

    def test_duplicate_observation(self):
        with pytest.raises(DuplicateRecordError):
            SurveyDataset(
                [household("F1", "H1")], [observation("F1", "H1"), observation("F1", "H1")]
            )

    def test_observation_for_unknown_household(self):
        with pytest.raises(DataError):
            SurveyDataset([household("F1", "H1")], [observation("F1", "H9")])

    def test_fsu_mixing_sectors(self):
        with pytest.raises(DataError):
            SurveyDataset([household("F1", "H1"), household("F1", "H2", Sector.URBAN)], [])

    def test_lookups(self, toy_dataset):
        assert toy_dataset.household(HouseholdKey("F2", "H2")).mpce == 800.0
        with pytest.raises(UnknownHouseholdError):
            toy_dataset.household(HouseholdKey("F9", "H1"))
        with pytest.raises(UnknownItemError):
            toy_dataset.require_item(999)
        assert toy_dataset.observation(HouseholdKey("F1", "H4"), 101) is None

    def test_item_frame_groups_rows_by_fsu(self, toy_dataset):
        frame = toy_dataset.item_frame(101)
        assert frame.fsus == ("F1", "F2")
        np.testing.assert_array_equal(frame.fsu_starts, [0, 3])
        np.testing.assert_array_equal(frame.fsu_counts, [3, 2])
        np.testing.assert_array_equal(frame.fsu_codes, [0, 0, 0, 1, 1])
        np.testing.assert_allclose(frame.price, [10.0, 10.0, 20.0, 15.0, 15.0])


class TestLoadCsv:
    def test_well_formed(self, tmp_path):
        path = write_rows(
            tmp_path / "s.csv",
            [
                ("F1", "H1", "rural", "01", 4, 1000, 101, 2, 30),
                ("F1", "H2", "rural", "01", 3, 900, 101, 1, 14),
                ("F2", "H1", "urban", "02", 2, 1500, 101, 5, 80),
            ],
        )
        ds = load_csv(path)
        assert len(ds.observations) == 3
        assert ds.rejections == ()

    def test_zero_quantity_dropped(self, tmp_path):
        path = write_rows(
            tmp_path / "s.csv",
            [
                ("F1", "H1", "rural", "01", 4, 1000, 101, 0, 30),
                ("F1", "H2", "rural", "01", 3, 900, 101, 1, 14),
            ],
        )
        ds = load_csv(path)
        assert len(ds.observations) == 1
        assert [(r.line, r.reason) for r in ds.rejections] == [(2, "non-positive quantity")]

    @pytest.mark.parametrize(
        "row,reason",
        [
            (("F1", "H1", "rural", "01", 0, 1000, 101, 1, 1), "non-positive hh_size"),
            (("F1", "H1", "rural", "01", 2, -5, 101, 1, 1), "non-positive mpce"),
            (("F1", "H1", "rural", "01", 2, 100, 101, 1, 0), "non-positive value"),
            (("F1", "H1", "suburb", "01", 2, 100, 101, 1, 1), "invalid sector"),
            (("F1", "H1", "rural", "01", "x", 100, 101, 1, 1), "unparseable hh_size"),
            (("F1", "H1", "rural", "01", 2, "inf", 101, 1, 1), "unparseable mpce"),
            (("F1", "H1", "rural", "01", 2, 100, 101, "1_000", 1), "unparseable quantity"),
            (("F1", "H1", "rural", "01", 2, 100, 101, "nan", 1), "unparseable quantity"),
            (("F1", "H1", "rural", "01", 2, 100, 101, 1, "-inf"), "unparseable value"),
            (("F1", "H1", "rural", "01", 2, 100, "x101", 1, 1), "unparseable item_code"),
        ],
    )
    def test_row_reasons(self, tmp_path, row, reason):
        ok = ("F1", "H2", "rural", "01", 3, 900, 101, 1, 14)
        ds = load_csv(write_rows(tmp_path / "s.csv", [row, ok]))
        assert [r.reason for r in ds.rejections] == [reason]
        assert len(ds.observations) == 1

    def test_duplicate_triple_is_fatal(self, tmp_path):
        row = ("F1", "H1", "rural", "01", 4, 1000, 101, 2, 30)
        with pytest.raises(DuplicateRecordError):
            load_csv(write_rows(tmp_path / "s.csv", [row, row]))

    def test_missing_column_named(self, tmp_path):
        header = ("fsu_id", "household_id", "sector", "state", "hh_size", "mpce")
        header += ("item_code", "qty", "value")
        row = ("F1", "H1", "rural", "01", 4, 1000, 101, 2, 30)
        path = write_rows(tmp_path / "s.csv", [row], header)
        with pytest.raises(SchemaError, match="quantity"):
            load_csv(path)

    def test_schema_mapping_and_sector_codes(self, tmp_path):
        header = ("fsu", "hhid", "sec", "state", "hh_size", "mpce", "item", "quantity", "value")
        row = ("F1", "H1", "2", "01", 4, 1000, 101, 2, 30)
        path = write_rows(tmp_path / "s.csv", [row], header)
        schema = SchemaConfig(
            columns={"fsu_id": "fsu", "household_id": "hhid", "sector": "sec", "item_code": "item"}
        )
        ds = load_csv(path, schema)
        assert ds.households[0].sector is Sector.URBAN

    def test_household_only_rows(self, tmp_path):
        path = write_rows(
            tmp_path / "s.csv",
            [
                ("F1", "H1", "rural", "01", 4, 1000, 101, 2, 30),
                ("F1", "H2", "rural", "01", 3, 900, "", "", ""),
            ],
        )
        ds = load_csv(path)
        assert len(ds.households) == 2
        assert len(ds.observations) == 1
        assert len(ds.households_in_fsu("F1")) == 2

    def test_conflicting_household_attributes(self, tmp_path):
        path = write_rows(
            tmp_path / "s.csv",
            [
                ("F1", "H1", "rural", "01", 4, 1000, 101, 2, 30),
                ("F1", "H1", "rural", "01", 5, 1000, 202, 2, 30),
            ],
        )
        with pytest.raises(DataError, match="conflicting"):
            load_csv(path)

    def test_write_then_load_round_trip(self, tmp_path):
        ds, _, _ = synthetic(n_fsu=30)
        assert load_csv(write_csv(ds, tmp_path / "out.csv")) == ds


class TestPriceRatios:
    def test_ratios(self, toy_dataset):
        assert fsu_price_ratios(toy_dataset, 101) == [("F1", 0.5), ("F2", 1.0)]

    def test_single_consumer_fsus_skipped(self, toy_dataset):
        assert fsu_price_ratios(toy_dataset, 202) == []

    def test_zero_jitter_gives_exact_unit_ratio(self):
        ds, _, _ = synthetic(within_fsu_price_jitter=0.0)
        ratios = [r for _, r in fsu_price_ratios(ds, 101)]
        assert ratios and all(r == 1.0 for r in ratios)


class TestHouseholdShare:
    def test_share(self, toy_dataset):
        share = household_share(toy_dataset, HouseholdKey("F1", "H1"), 101)
        assert share == pytest.approx(20.0 / 4 / 1000)

    def test_override(self, toy_dataset):
        key = HouseholdKey("F2", "H1")
        share = household_share(toy_dataset, key, 101, value_override=45.0)
        assert share == pytest.approx(45.0 / 3 / 1500)

    def test_non_consumer(self, toy_dataset):
        with pytest.raises(DataError):
            household_share(toy_dataset, HouseholdKey("F1", "H4"), 101)
