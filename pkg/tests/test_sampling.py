"""Tests for thin-sample draws, star prices and repetition seeding."""

import math

import numpy as np
import pandas as pd
import pytest
from conftest import household, observation

from thinprice.core.sampling import (
    RepetitionPlan,
    ThinSampleAssignment,
    assign_star_prices,
    draw_thin_sample,
    repetition_seeds,
    write_selection_audit,
)
from thinprice.errors import ConfigError, DatasetMismatchError, UnknownItemError
from thinprice.survey.dataset import HouseholdKey, SurveyDataset


def forced(ds, item, choice):
    """Assignment selecting the given household id in every FSU."""
    return ThinSampleAssignment(
        item=item, selection={fsu: HouseholdKey(fsu, hh) for fsu, hh in choice.items()}, seed=0
    )


class TestDrawThinSample:
    def test_one_selection_per_consuming_fsu(self, toy_dataset):
        a = draw_thin_sample(toy_dataset, 101, seed=1)
        assert sorted(a.selection) == ["F1", "F2"]
        for fsu, key in a.selection.items():
            assert key.fsu_id == fsu
            assert key in toy_dataset.fsu_index[101][fsu]

    def test_single_consumer_forced(self, toy_dataset):
        forced = {"F3": HouseholdKey("F3", "H1")}
        for seed in range(20):
            assert draw_thin_sample(toy_dataset, 202, seed).selection == forced

    def test_deterministic(self, small_synthetic):
        first = draw_thin_sample(small_synthetic, 101, 99)
        assert draw_thin_sample(small_synthetic, 101, 99) == first

    def test_unknown_item(self, toy_dataset):
        with pytest.raises(UnknownItemError):
            draw_thin_sample(toy_dataset, 999, 1)

    def test_uniform_within_fsu(self):
        households = [household("F1", f"H{h}") for h in range(1, 5)]
        ds = SurveyDataset(households, [observation("F1", f"H{h}") for h in range(1, 5)])
        seeds = repetition_seeds(RepetitionPlan(master_seed=314, repetitions=10000))
        picks = pd.Series(
            [draw_thin_sample(ds, 101, int(s)).selection["F1"].household_id for s in seeds]
        )
        freq = picks.value_counts(normalize=True)
        assert set(freq.index) == {"H1", "H2", "H3", "H4"}
        assert np.all(np.abs(freq.to_numpy() - 0.25) <= 0.015)

    def test_selections_independent_across_fsus(self):
        households = [household(f, h) for f in ("F1", "F2") for h in ("H1", "H2")]
        observations = [observation(r.key.fsu_id, r.key.household_id) for r in households]
        ds = SurveyDataset(households, observations)
        seeds = repetition_seeds(RepetitionPlan(master_seed=8, repetitions=8000))
        draws = [draw_thin_sample(ds, 101, int(s)).selection for s in seeds]
        first = np.array([d["F1"].household_id == "H1" for d in draws])
        second = np.array([d["F2"].household_id == "H1" for d in draws])
        joint = np.mean(first & second)
        assert joint == pytest.approx(first.mean() * second.mean(), abs=0.02)


class TestAssignStarPrices:
    def test_selected_price_propagates(self, toy_dataset):
        a = forced(toy_dataset, 101, {"F1": "H3", "F2": "H1"})
        star = {s.key: s for s in assign_star_prices(toy_dataset, a)}
        assert len(star) == 5
        assert star[HouseholdKey("F1", "H1")].star_price == 20.0
        assert star[HouseholdKey("F1", "H1")].log_price_ratio == pytest.approx(math.log(2.0))
        assert star[HouseholdKey("F1", "H3")].log_price_ratio == 0.0

    def test_cheaper_selection(self, toy_dataset):
        a = forced(toy_dataset, 101, {"F1": "H1", "F2": "H2"})
        star = {s.key: s for s in assign_star_prices(toy_dataset, a)}
        assert star[HouseholdKey("F1", "H3")].star_price == 10.0
        assert star[HouseholdKey("F1", "H3")].log_price_ratio == pytest.approx(math.log(0.5))

    def test_homogeneous_fsu_has_zero_ratio(self, toy_dataset):
        a = forced(toy_dataset, 101, {"F1": "H1", "F2": "H2"})
        for s in assign_star_prices(toy_dataset, a):
            if s.key.fsu_id == "F2":
                assert s.log_price_ratio == 0.0
                assert s.star_price == s.actual_price

    def test_observations_unchanged(self, small_synthetic):
        a = draw_thin_sample(small_synthetic, 101, 5)
        star = assign_star_prices(small_synthetic, a)
        assert [s.base for s in star] == list(small_synthetic.observations_for(101))
        for s in star:
            assert s.actual_price == pytest.approx(s.base.value / s.base.quantity, rel=1e-15)

    def test_missing_fsu_is_mismatch(self, toy_dataset):
        with pytest.raises(DatasetMismatchError):
            assign_star_prices(toy_dataset, forced(toy_dataset, 101, {"F1": "H1"}))

    def test_non_consumer_is_mismatch(self, toy_dataset):
        with pytest.raises(DatasetMismatchError):
            assign_star_prices(toy_dataset, forced(toy_dataset, 101, {"F1": "H4", "F2": "H1"}))


class TestRepetitionSeeds:
    def test_deterministic(self):
        np.testing.assert_array_equal(
            repetition_seeds(RepetitionPlan(17, 1)), repetition_seeds(RepetitionPlan(17, 1))
        )

    def test_distinct(self):
        seeds = repetition_seeds(RepetitionPlan(17, 1000))
        assert seeds.dtype == np.uint64
        assert np.unique(seeds).size == 1000

    def test_sensitive_to_master_seed_and_salt(self):
        base = repetition_seeds(RepetitionPlan(17, 50))
        assert not np.array_equal(base, repetition_seeds(RepetitionPlan(18, 50)))
        assert not np.array_equal(base, repetition_seeds(RepetitionPlan(17, 50, salt=1)))

    def test_prefix_stable(self):
        np.testing.assert_array_equal(
            repetition_seeds(RepetitionPlan(17, 10)), repetition_seeds(RepetitionPlan(17, 100))[:10]
        )

    @pytest.mark.parametrize("kwargs", [{"repetitions": 0}, {"master_seed": -1}, {"salt": -3}])
    def test_invalid_plan(self, kwargs):
        params = {"master_seed": 1, **kwargs}
        with pytest.raises(ConfigError):
            RepetitionPlan(**params)


class TestSelectionAudit:
    def test_csv(self, tmp_path, toy_dataset):
        a = forced(toy_dataset, 101, {"F2": "H2", "F1": "H3"})
        path = write_selection_audit(tmp_path / "audit" / "rep_1.csv", a)
        assert path.read_text(encoding="utf-8") == "fsu_id,selected_household_id\nF1,H3\nF2,H2\n"
