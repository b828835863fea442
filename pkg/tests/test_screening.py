"""Tests for price-ratio screening."""

import pytest
from conftest import synthetic

from thinprice.errors import ConfigError
from thinprice.survey.screening import ExclusionReason, ScreeningRules, screen_items


class TestScreeningRules:
    @pytest.mark.parametrize("name", ["ratio_threshold", "mass_threshold"])
    @pytest.mark.parametrize("value", [0.0, 1.0, 1.5])
    def test_thresholds_inside_unit_interval(self, name, value):
        with pytest.raises(ConfigError):
            ScreeningRules(**{name: value})

    def test_from_dict_rejects_unknown_key(self):
        with pytest.raises(ConfigError):
            ScreeningRules.from_dict({"threshold": 0.5})

    def test_from_dict_lists(self):
        rules = ScreeningRules.from_dict({"variable_unit_items": [3, 1], "manual_exclusions": [7]})
        assert rules.variable_unit_items == frozenset({1, 3})
        assert rules.to_dict()["variable_unit_items"] == [1, 3]


class TestScreenItems:
    def test_histogram_counts_match_multi_consumer_fsus(self, toy_dataset):
        report = screen_items(toy_dataset, ScreeningRules())
        res = report.items[101]
        assert sum(res.counts) == res.n_ratios == 2
        assert len(res.bin_edges) == len(res.counts) + 1
        assert res.bin_edges[0] == 0.0 and res.bin_edges[-1] == 1.0

    def test_unit_ratio_lands_in_last_bin(self, toy_dataset):
        res = screen_items(toy_dataset, ScreeningRules(bins=4)).items[101]
        # ratios 0.5 and 1.0
        assert res.counts == (0, 0, 1, 1)

    def test_heterogeneous_item_excluded(self, toy_dataset):
        # half of the FSU ratios (0.5) fall below t = 0.6
        rules = ScreeningRules(ratio_threshold=0.6, mass_threshold=0.2)
        res = screen_items(toy_dataset, rules).items[101]
        assert res.mass_below == 0.5
        assert not res.included
        assert res.reason is ExclusionReason.HETEROGENEOUS_PRICE

    def test_homogeneous_item_included(self, toy_dataset):
        report = screen_items(toy_dataset, ScreeningRules(ratio_threshold=0.5))
        # 0.5 is not strictly below 0.5
        assert report.items[101].mass_below == 0.0
        assert 101 in report.included_items

    def test_item_without_ratios_included(self, toy_dataset):
        res = screen_items(toy_dataset, ScreeningRules()).items[202]
        assert res.n_ratios == 0 and res.mass_below == 0.0 and res.included

    def test_exclusion_precedence(self, toy_dataset):
        rules = ScreeningRules(
            ratio_threshold=0.6,
            variable_unit_items=frozenset({101}),
            manual_exclusions=frozenset({101, 202}),
        )
        report = screen_items(toy_dataset, rules)
        assert report.items[101].reason is ExclusionReason.VARIABLE_UNIT
        assert report.items[202].reason is ExclusionReason.MANUAL
        assert report.included_items == ()
        assert report.excluded_items == (101, 202)

    def test_dispersed_synthetic_prices_excluded(self):
        tight, _, _ = synthetic(within_fsu_price_jitter=0.01)
        loose, _, _ = synthetic(within_fsu_price_jitter=1.0)
        rules = ScreeningRules()
        assert screen_items(tight, rules).items[101].included
        assert not screen_items(loose, rules).items[101].included

    def test_histogram_rows_and_dict(self, toy_dataset):
        report = screen_items(toy_dataset, ScreeningRules(bins=5))
        rows = report.histogram_rows()
        assert len(rows) == 10
        assert rows[0][:3] == (101, 0.0, 0.2)
        payload = report.to_dict()
        assert [entry["item"] for entry in payload["items"]] == [101, 202]
