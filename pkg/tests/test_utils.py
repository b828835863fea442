"""Tests for logging setup and atomic JSON output."""

import json
import logging
import math

import numpy as np
import pytest
from rich.logging import RichHandler

from thinprice.utils.io import atomic_write_json, dumps_json, to_jsonable
from thinprice.utils.logs import LOG_ENV_VAR, configure_logging, resolve_level


class TestResolveLevel:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (None, (logging.WARNING, True)),
            ("", (logging.WARNING, True)),
            ("debug", (logging.DEBUG, True)),
            (" INFO ", (logging.INFO, True)),
            ("chatty", (logging.WARNING, False)),
        ],
    )
    def test_levels(self, value, expected):
        assert resolve_level(value) == expected


class TestConfigureLogging:
    def test_env_var(self, monkeypatch):
        monkeypatch.setenv(LOG_ENV_VAR, "DEBUG")
        assert configure_logging().level == logging.DEBUG

    def test_explicit_level_wins(self, monkeypatch):
        monkeypatch.setenv(LOG_ENV_VAR, "DEBUG")
        assert configure_logging("ERROR").level == logging.ERROR

    def test_idempotent(self):
        configure_logging("INFO")
        logger = configure_logging("INFO")
        assert sum(isinstance(h, RichHandler) for h in logger.handlers) == 1


class TestJson:
    def test_non_finite_and_numpy_values(self):
        payload = {
            "b": np.float64(math.inf),
            "a": np.array([1.0, math.nan]),
            "c": (np.int64(3), -math.inf),
        }
        assert to_jsonable(payload) == {"b": "inf", "a": [1.0, "nan"], "c": [3, "-inf"]}

    def test_deterministic_text(self):
        text = dumps_json({"z": 1, "a": [0.5]})
        assert text == '{\n  "a": [\n    0.5\n  ],\n  "z": 1\n}\n'

    def test_atomic_write(self, tmp_path):
        path = atomic_write_json(tmp_path / "deep" / "out.json", {"x": np.float64(0.25)})
        assert json.loads(path.read_text(encoding="utf-8")) == {"x": 0.25}
        assert [p.name for p in path.parent.iterdir()] == ["out.json"]
