"""Tests for the floating-point comparison helpers."""

import math

import pytest

from thinprice.precision import (
    is_close,
    is_constant,
    is_zero,
    relative_error,
    snap_to_integer,
    snap_unit_ratio,
)


class TestIsClose:
    def test_sum_of_tenths(self):
        assert is_close(0.1 + 0.2, 0.3)

    def test_distinct_values(self):
        assert not is_close(1.0, 1.001)

    def test_nan_never_close(self):
        assert not is_close(math.nan, math.nan)

    def test_infinity_close_only_to_itself(self):
        assert is_close(math.inf, math.inf)
        assert not is_close(math.inf, 1e308)


class TestSnapping:
    @pytest.mark.parametrize(
        "n,q,expected", [(1000, 0.3, 300.0), (10, 0.7, 7.0), (3, 0.1, 0.30000000000000004)]
    )
    def test_snap_to_integer(self, n, q, expected):
        assert snap_to_integer(n * q) == expected

    def test_half_is_not_snapped(self):
        assert snap_to_integer(300.5) == 300.5

    def test_unit_ratio(self):
        assert snap_unit_ratio(0.9999999999999998) == 1.0
        assert snap_unit_ratio(0.999) == 0.999


class TestColumns:
    def test_is_zero(self):
        assert is_zero(1e-15)
        assert not is_zero(1e-3)
        assert not is_zero(math.nan)

    def test_constant_columns(self):
        assert is_constant([])
        assert is_constant([2.5, 2.5, 2.5])
        assert is_constant([0.0, 1e-17, -1e-17])
        assert is_constant([1e6, 1e6 + 1e-7])

    def test_varying_column(self):
        assert not is_constant([0.0, 1e-6])

    def test_relative_error(self):
        assert relative_error([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert relative_error([3.0, 4.0], [0.0, 0.0]) == 5.0
        assert relative_error([1.1, 0.0], [1.0, 0.0]) == pytest.approx(0.1)

    def test_relative_error_shape_mismatch(self):
        with pytest.raises(ValueError):
            relative_error([1.0], [1.0, 2.0])
