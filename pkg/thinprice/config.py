"""
Metadata:
    Project: ThinPrice
    File Name: config.py
    File Path: thinprice/config.py
    Module: Run Configuration
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    RunConfig describes one pipeline run: where the data comes from, which
    items to analyse, the prevalence thresholds, the repetition plan and
    the screening rules. Every field has a default, so a config file
    holding only an input block is complete.

File format (JSON):
    {
      "input": {"csv": "survey.csv"}                    # or
      "input": {"synthetic": {"synth": {...}, "truth": {...}}},
      "schema": {"columns": {...}, "sector_codes": {...}},
      "items": [101, 172] | "all-surviving-screening",
      "q_levels": [0.5, 0.4, 0.3],
      "repetitions": 1000, "alpha": 0.05, "meta_alpha": 0.05,
      "master_seed": 0, "salt": 0, "output_dir": "thinprice-out",
      "threads": 0, "exact_pmf_cap": 20000, "condition_cap": 1e12,
      "audit_selections": false,
      "continuity_correction": false,
      "screening": {"ratio_threshold": 0.5, "mass_threshold": 0.2,
                    "variable_unit_items": [], "manual_exclusions": [],
                    "bins": 20}
    }

    A relative CSV path is resolved against the config file's directory.

Contents:
    Classes:
        - RunConfig: Immutable run configuration

    Functions:
        - validate_config: Violations as a list of strings
        - load_config: Read, override and validate a config file
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from thinprice.core.inference import DEFAULT_CONDITION_CAP
from thinprice.core.prevalence import DEFAULT_EXACT_CAP, DEFAULT_Q_LEVELS
from thinprice.core.sampling import DEFAULT_REPETITIONS
from thinprice.errors import ConfigError, DataError
from thinprice.survey.dataset import SchemaConfig
from thinprice.survey.screening import ScreeningRules
from thinprice.survey.synth import load_synthetic_spec

ALL_SURVIVING = "all-surviving-screening"

ItemSelection = Union[tuple[int, ...], str]


@dataclass(frozen=True)
class RunConfig:
    """
    Configuration of one pipeline run.

    Construction does not validate; call validate_config (load_config does).
    Without an input_csv the run generates a synthetic survey from
    `synthetic` (an empty spec means every SynthConfig default).
    """

    input_csv: Optional[str] = None
    synthetic: Optional[Mapping[str, Any]] = None
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    items: ItemSelection = ALL_SURVIVING
    q_levels: tuple[float, ...] = DEFAULT_Q_LEVELS
    repetitions: int = DEFAULT_REPETITIONS
    alpha: float = 0.05
    meta_alpha: float = 0.05
    master_seed: int = 0
    salt: int = 0
    output_dir: str = "thinprice-out"
    threads: int = 0
    exact_pmf_cap: int = DEFAULT_EXACT_CAP
    condition_cap: float = DEFAULT_CONDITION_CAP
    audit_selections: bool = False
    continuity_correction: bool = False
    screening: ScreeningRules = field(default_factory=ScreeningRules)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base_dir: Optional[Path] = None) -> RunConfig:
        """
        Build a RunConfig from parsed JSON.

        Raises:
            ConfigError: On unknown keys, malformed blocks or a value of the
                wrong type; the message names the field
        """
        known = {
            "input",
            "schema",
            "items",
            "q_levels",
            "repetitions",
            "alpha",
            "meta_alpha",
            "master_seed",
            "salt",
            "output_dir",
            "threads",
            "exact_pmf_cap",
            "condition_cap",
            "audit_selections",
            "continuity_correction",
            "screening",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")

        kwargs: dict[str, Any] = {}
        block = data.get("input", {})
        if not isinstance(block, Mapping):
            raise ConfigError("input must be an object with a 'csv' or 'synthetic' key")
        bad = set(block) - {"csv", "synthetic"}
        if bad:
            raise ConfigError(f"Unknown input keys: {sorted(bad)}")
        if "csv" in block:
            if not isinstance(block["csv"], str):
                raise ConfigError(f"input.csv must be a path string, got {block['csv']!r}")
            csv_path = Path(block["csv"])
            if base_dir is not None and not csv_path.is_absolute():
                csv_path = base_dir / csv_path
            kwargs["input_csv"] = str(csv_path)
        if "synthetic" in block:
            if not isinstance(block["synthetic"], Mapping):
                raise ConfigError("input.synthetic must be an object")
            kwargs["synthetic"] = dict(block["synthetic"])

        try:
            if "schema" in data:
                kwargs["schema"] = SchemaConfig.from_dict(data["schema"])
        except DataError as exc:
            raise ConfigError(str(exc)) from exc
        if "screening" in data:
            kwargs["screening"] = ScreeningRules.from_dict(data["screening"])
        if "items" in data:
            kwargs["items"] = parse_items(data["items"])
        if "q_levels" in data:
            levels = data["q_levels"]
            if isinstance(levels, (str, Mapping)) or not isinstance(levels, Sequence):
                raise ConfigError(f"q_levels must be a list of numbers, got {levels!r}")
            kwargs["q_levels"] = tuple(_as_float("q_levels", q) for q in levels)
        for name in ("repetitions", "master_seed", "salt", "threads", "exact_pmf_cap"):
            if name in data:
                kwargs[name] = _as_int(name, data[name])
        for name in ("alpha", "meta_alpha", "condition_cap"):
            if name in data:
                kwargs[name] = _as_float(name, data[name])
        for name in ("audit_selections", "continuity_correction"):
            if name in data:
                kwargs[name] = _as_bool(name, data[name])
        if "output_dir" in data:
            if not isinstance(data["output_dir"], str):
                raise ConfigError(f"output_dir must be a string, got {data['output_dir']!r}")
            kwargs["output_dir"] = data["output_dir"]
        return cls(**kwargs)

    def with_overrides(
        self,
        items: Optional[ItemSelection] = None,
        master_seed: Optional[int] = None,
        output_dir: Optional[str] = None,
        threads: Optional[int] = None,
    ) -> RunConfig:
        """Copy with CLI overrides applied (None leaves a field unchanged)."""
        changes: dict[str, Any] = {}
        if items is not None:
            changes["items"] = items
        if master_seed is not None:
            changes["master_seed"] = master_seed
        if output_dir is not None:
            changes["output_dir"] = output_dir
        if threads is not None:
            changes["threads"] = threads
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        """Echo of the config, as written to the run manifest."""
        input_block: dict[str, Any] = {}
        if self.input_csv is not None:
            input_block["csv"] = self.input_csv
        if self.synthetic is not None:
            input_block["synthetic"] = self.synthetic
        return {
            "input": input_block,
            "schema": self.schema.to_dict(),
            "items": self.items if isinstance(self.items, str) else list(self.items),
            "q_levels": list(self.q_levels),
            "repetitions": self.repetitions,
            "alpha": self.alpha,
            "meta_alpha": self.meta_alpha,
            "master_seed": self.master_seed,
            "salt": self.salt,
            "output_dir": self.output_dir,
            "threads": self.threads,
            "exact_pmf_cap": self.exact_pmf_cap,
            "condition_cap": self.condition_cap,
            "audit_selections": self.audit_selections,
            "continuity_correction": self.continuity_correction,
            "screening": self.screening.to_dict(),
        }


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _as_float(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_bool(name: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{name} must be true or false, got {value!r}")
    return value


def parse_items(value: Union[str, Sequence[Any]]) -> ItemSelection:
    """
    Parse an item selection: "all-surviving-screening", a list of codes, or
    a comma-separated string of codes ("101,172").

    Raises:
        ConfigError: On a non-integer code
    """
    if isinstance(value, str):
        text = value.strip()
        if text == ALL_SURVIVING:
            return ALL_SURVIVING
        parts = [p.strip() for p in text.split(",") if p.strip()]
    else:
        parts = list(value)
    try:
        return tuple(sorted({int(p) for p in parts}))
    except (TypeError, ValueError):
        raise ConfigError(
            f"items must be {ALL_SURVIVING!r} or a list of integer codes, got {value!r}"
        ) from None


def validate_config(cfg: RunConfig) -> list[str]:
    """
    Check every RunConfig invariant.

    Returns:
        list[str]: One message per violation, each naming the field;
        empty iff the config is valid

    Examples:
        >>> validate_config(RunConfig())
        []
        >>> validate_config(RunConfig(input_csv="survey.csv", alpha=1.5))
        ['alpha must lie in (0, 1), got 1.5']
    """
    violations: list[str] = []
    seed_ok = 0 <= cfg.master_seed < 2**64
    if not seed_ok:
        violations.append(
            f"master_seed must be a non-negative 64-bit integer, got {cfg.master_seed}"
        )
    if cfg.input_csv is not None and cfg.synthetic is not None:
        violations.append("input must name only one of 'csv' or 'synthetic'")
    # the synthetic spec draws its ground truth from master_seed
    if cfg.input_csv is None and seed_ok:
        try:
            load_synthetic_spec(cfg.synthetic or {}, cfg.master_seed)
        except ConfigError as exc:
            violations.extend(f"input.synthetic: {v}" for v in (exc.violations or [str(exc)]))
    if isinstance(cfg.items, str):
        if cfg.items != ALL_SURVIVING:
            violations.append(
                f"items must be {ALL_SURVIVING!r} or a list of item codes, got {cfg.items!r}"
            )
    elif not cfg.items:
        violations.append("items must not be empty")
    if not cfg.q_levels:
        violations.append("q_levels must not be empty")
    for q in cfg.q_levels:
        if not 0.0 < q < 1.0:
            violations.append(f"q_levels entries must lie in (0, 1), got {q}")
    if cfg.repetitions < 1:
        violations.append(f"repetitions must be >= 1, got {cfg.repetitions}")
    for name in ("alpha", "meta_alpha"):
        value = getattr(cfg, name)
        if not 0.0 < value < 1.0:
            violations.append(f"{name} must lie in (0, 1), got {value}")
    if cfg.salt < 0:
        violations.append(f"salt must be >= 0, got {cfg.salt}")
    if cfg.threads < 0:
        violations.append(f"threads must be >= 0 (0 = auto), got {cfg.threads}")
    if cfg.exact_pmf_cap < 1:
        violations.append(f"exact_pmf_cap must be >= 1, got {cfg.exact_pmf_cap}")
    if not cfg.condition_cap >= 1.0:
        violations.append(f"condition_cap must be >= 1, got {cfg.condition_cap}")
    if not cfg.output_dir:
        violations.append("output_dir must not be empty")
    return violations


def load_config(
    path: Union[str, Path],
    items: Optional[ItemSelection] = None,
    master_seed: Optional[int] = None,
    output_dir: Optional[str] = None,
    threads: Optional[int] = None,
) -> RunConfig:
    """
    Read a JSON config file, apply overrides and validate.

    Raises:
        ConfigError: If the file is unreadable, not JSON, or invalid
    """
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Cannot read config {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Config {source} is not valid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError(f"Config {source} must hold a JSON object")
    cfg = RunConfig.from_dict(data, base_dir=source.parent)
    cfg = cfg.with_overrides(items, master_seed, output_dir, threads)
    violations = validate_config(cfg)
    if violations:
        raise ConfigError(f"Invalid config {source}: " + "; ".join(violations), violations)
    return cfg
