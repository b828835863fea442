"""
Metadata:
    Project: ThinPrice
    File Name: synth.py
    File Path: thinprice/survey/synth.py
    Module: Synthetic Survey Generator
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Generates survey datasets from the log-log demand model with known
    coefficients, so every downstream stage can be checked against ground
    truth without access to restricted survey microdata.

    Data-generating process, per FSU i and household h:

        base_i            ~ N(base_log_price_mean, base_log_price_spread)
        log P_ih          = base_i + N(0, within_fsu_price_jitter)
        S_ih              = 1 + Poisson(hh_size_lambda)
        log E_ih          ~ N(log_mpce_mean, log_mpce_spread)
        consumes_ih       ~ Bernoulli(p_i)
        log Q_ih          = alpha[sector_i] + beta[state_i] + g1 S_ih
                            + g2 log P_ih + g3 log E_ih + N(0, noise_sd)
        value_ih          = P_ih * Q_ih

    Households that do not consume the item are generated all the same and
    simply have no observation.

Seeding:
    Every FSU draws from SeedSequence(seed, spawn_key=(i,)) and every
    household from SeedSequence(seed, spawn_key=(i, h)). Output therefore
    does not depend on generation order, and each FSU can be produced
    independently.

Contents:
    Classes:
        - SynthConfig: Dataset shape and distribution parameters
        - GroundTruth: Demand coefficients and per-FSU consumption probabilities

    Functions:
        - make_ground_truth: GroundTruth with defaults and drawn probabilities
        - generate: Draw a SurveyDataset
        - true_prevalence_probs: The p_i used in generation
        - load_synthetic_spec: SynthConfig + GroundTruth from a config mapping
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from thinprice.errors import ConfigError
from thinprice.survey.dataset import (
    HouseholdKey,
    HouseholdRecord,
    ItemObservation,
    Sector,
    SurveyDataset,
)

# spawn_key stream reserved for ground-truth draws; FSU ordinals are >= 0
_TRUTH_STREAM = 2**32 - 1


@dataclass(frozen=True)
class SynthConfig:
    """
    Shape and distribution parameters of a synthetic survey.

    Attributes:
        n_fsu (int): Number of FSUs (default 12734)
        households_per_fsu (tuple[int, int]): Inclusive size range
        n_states (int): Number of state codes
        sector_split (float): Probability an FSU is rural
        consumption_prob_range (tuple[float, float]): Range of p_i, inside (0, 1)
        base_log_price_mean, base_log_price_spread (float): FSU log price
        within_fsu_price_jitter (float): SD of household log price around
            the FSU base (0 = identical prices within an FSU)
        log_mpce_mean, log_mpce_spread (float): Log MPCE distribution
        hh_size_lambda (float): Household size is 1 + Poisson(lambda)
        noise_sd (float): Demand equation error SD
        item_code (int): Code of the generated item

    Raises:
        ConfigError: On any out-of-range parameter
    """

    n_fsu: int = 12734
    households_per_fsu: tuple[int, int] = (8, 8)
    n_states: int = 10
    sector_split: float = 0.59
    consumption_prob_range: tuple[float, float] = (0.2, 0.8)
    base_log_price_mean: float = 3.0
    base_log_price_spread: float = 0.3
    within_fsu_price_jitter: float = 0.05
    log_mpce_mean: float = 7.5
    log_mpce_spread: float = 0.5
    hh_size_lambda: float = 3.0
    noise_sd: float = 0.3
    item_code: int = 101

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "households_per_fsu", tuple(int(v) for v in self.households_per_fsu)
        )
        object.__setattr__(
            self, "consumption_prob_range", tuple(float(v) for v in self.consumption_prob_range)
        )
        problems = self.violations()
        if problems:
            raise ConfigError("Invalid synthetic configuration: " + "; ".join(problems), problems)

    def violations(self) -> list[str]:
        problems: list[str] = []
        if self.n_fsu < 1:
            problems.append(f"n_fsu must be >= 1, got {self.n_fsu}")
        lo_h, hi_h = self.households_per_fsu
        if not 1 <= lo_h <= hi_h:
            problems.append(
                f"households_per_fsu must satisfy 1 <= lo <= hi, got {self.households_per_fsu}"
            )
        if self.n_states < 1:
            problems.append(f"n_states must be >= 1, got {self.n_states}")
        if not 0.0 <= self.sector_split <= 1.0:
            problems.append(f"sector_split must lie in [0, 1], got {self.sector_split}")
        lo, hi = self.consumption_prob_range
        if not 0.0 < lo <= hi < 1.0:
            problems.append(
                "consumption_prob_range must satisfy 0 < lo <= hi < 1, "
                f"got {self.consumption_prob_range}"
            )
        for name in (
            "base_log_price_spread",
            "within_fsu_price_jitter",
            "log_mpce_spread",
            "hh_size_lambda",
            "noise_sd",
        ):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                problems.append(f"{name} must be a finite value >= 0, got {value}")
        return problems

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["households_per_fsu"] = list(self.households_per_fsu)
        data["consumption_prob_range"] = list(self.consumption_prob_range)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SynthConfig:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown synth keys: {sorted(unknown)}")
        return cls(**dict(data))


@dataclass(frozen=True)
class GroundTruth:
    """
    True coefficients of the demand model.

    Attributes:
        sector_effects (tuple[float, float]): alpha for (rural, urban)
        state_effects (tuple[float, ...]): beta per state, length n_states
        gamma_size (float): Coefficient of household size
        gamma_price (float): Coefficient of log price
        gamma_expenditure (float): Coefficient of log MPCE
        consumption_probs (tuple[float, ...]): p_i per FSU, length n_fsu
    """

    sector_effects: tuple[float, ...]
    state_effects: tuple[float, ...]
    gamma_size: float
    gamma_price: float
    gamma_expenditure: float
    consumption_probs: tuple[float, ...]

    def check(self, cfg: SynthConfig) -> None:
        """Raise ConfigError unless vector lengths match cfg's level counts."""
        problems = []
        if len(self.sector_effects) != 2:
            problems.append(f"sector_effects needs 2 entries, got {len(self.sector_effects)}")
        if len(self.state_effects) != cfg.n_states:
            problems.append(
                f"state_effects needs {cfg.n_states} entries, got {len(self.state_effects)}"
            )
        if len(self.consumption_probs) != cfg.n_fsu:
            problems.append(
                f"consumption_probs needs {cfg.n_fsu} entries, got {len(self.consumption_probs)}"
            )
        if any(not 0.0 <= p <= 1.0 for p in self.consumption_probs):
            problems.append("consumption_probs must lie in [0, 1]")
        if problems:
            raise ConfigError(
                "Ground truth inconsistent with configuration: " + "; ".join(problems), problems
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "sector_effects": list(self.sector_effects),
            "state_effects": list(self.state_effects),
            "gamma_size": self.gamma_size,
            "gamma_price": self.gamma_price,
            "gamma_expenditure": self.gamma_expenditure,
            "consumption_probs": list(self.consumption_probs),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> GroundTruth:
        """Inverse of to_dict; reads the "truth" block of a synth *_truth.json."""
        fields = set(cls.__dataclass_fields__)
        unknown = set(data) - fields
        missing = fields - set(data)
        if unknown or missing:
            raise ConfigError(
                f"Ground truth keys: unknown {sorted(unknown)}, missing {sorted(missing)}"
            )
        return cls(
            sector_effects=tuple(float(v) for v in data["sector_effects"]),
            state_effects=tuple(float(v) for v in data["state_effects"]),
            gamma_size=float(data["gamma_size"]),
            gamma_price=float(data["gamma_price"]),
            gamma_expenditure=float(data["gamma_expenditure"]),
            consumption_probs=tuple(float(p) for p in data["consumption_probs"]),
        )


def state_code(index: int, n_states: int) -> str:
    """Zero-padded state code, at least two digits ("01", "02", ...)."""
    width = max(2, len(str(n_states)))
    return f"{index + 1:0{width}d}"


def _rng(seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=spawn_key))


def make_ground_truth(
    cfg: SynthConfig,
    seed: int,
    *,
    sector_effects: Optional[Sequence[float]] = None,
    state_effects: Optional[Sequence[float]] = None,
    gamma_size: float = 0.05,
    gamma_price: float = -0.5,
    gamma_expenditure: float = 0.6,
    consumption_probs: Optional[Sequence[float]] = None,
) -> GroundTruth:
    """
    Build a GroundTruth consistent with cfg.

    Unspecified effects default to (0.0, -0.1) for sectors and an evenly
    spaced grid on [-0.2, 0.2] for states. Unspecified consumption
    probabilities are drawn uniformly from cfg.consumption_prob_range with
    a stream derived from seed.

    Raises:
        ConfigError: If supplied vectors have the wrong length
    """
    if sector_effects is None:
        sector_effects = (0.0, -0.1)
    if state_effects is None:
        state_effects = tuple(np.linspace(-0.2, 0.2, cfg.n_states)) if cfg.n_states > 1 else (0.0,)
    if consumption_probs is None:
        lo, hi = cfg.consumption_prob_range
        consumption_probs = _rng(seed, _TRUTH_STREAM).uniform(lo, hi, size=cfg.n_fsu)
    truth = GroundTruth(
        sector_effects=tuple(float(v) for v in sector_effects),
        state_effects=tuple(float(v) for v in state_effects),
        gamma_size=float(gamma_size),
        gamma_price=float(gamma_price),
        gamma_expenditure=float(gamma_expenditure),
        consumption_probs=tuple(float(p) for p in consumption_probs),
    )
    truth.check(cfg)
    return truth


def true_prevalence_probs(truth: GroundTruth) -> np.ndarray:
    """Per-FSU consumption probabilities p_i used in generation."""
    return np.array(truth.consumption_probs, dtype=float)


def _generate_fsu(
    cfg: SynthConfig, truth: GroundTruth, seed: int, fsu: int, fsu_width: int
) -> tuple[list[HouseholdRecord], list[ItemObservation]]:
    frng = _rng(seed, fsu)
    lo_h, hi_h = cfg.households_per_fsu
    n_households = int(frng.integers(lo_h, hi_h + 1))
    rural = bool(frng.random() < cfg.sector_split)
    state_index = int(frng.integers(cfg.n_states))
    base_log_price = float(frng.normal(cfg.base_log_price_mean, cfg.base_log_price_spread))

    sector = Sector.RURAL if rural else Sector.URBAN
    fixed_effect = truth.sector_effects[0 if rural else 1] + truth.state_effects[state_index]
    state = state_code(state_index, cfg.n_states)
    fsu_id = f"F{fsu + 1:0{fsu_width}d}"
    p_consume = truth.consumption_probs[fsu]

    records: list[HouseholdRecord] = []
    observations: list[ItemObservation] = []
    for h in range(n_households):
        hrng = _rng(seed, fsu, h)
        hh_size = 1 + int(hrng.poisson(cfg.hh_size_lambda))
        log_mpce = float(hrng.normal(cfg.log_mpce_mean, cfg.log_mpce_spread))
        consumes = bool(hrng.random() < p_consume)
        log_price = base_log_price + float(hrng.normal(0.0, cfg.within_fsu_price_jitter))
        error = float(hrng.normal(0.0, cfg.noise_sd))

        key = HouseholdKey(fsu_id, f"H{h + 1:03d}")
        records.append(
            HouseholdRecord(
                key=key, sector=sector, state=state, hh_size=hh_size, mpce=math.exp(log_mpce)
            )
        )
        if consumes:
            log_q = (
                fixed_effect
                + truth.gamma_size * hh_size
                + truth.gamma_price * log_price
                + truth.gamma_expenditure * log_mpce
                + error
            )
            quantity = math.exp(log_q)
            observations.append(
                ItemObservation(
                    key=key,
                    item_code=cfg.item_code,
                    quantity=quantity,
                    value=math.exp(log_price) * quantity,
                )
            )
    return records, observations


def generate(cfg: SynthConfig, truth: GroundTruth, seed: int) -> SurveyDataset:
    """
    Draw a synthetic SurveyDataset.

    Args:
        cfg (SynthConfig): Shape and distributions
        truth (GroundTruth): Coefficients and p_i
        seed (int): Master seed (64-bit)

    Returns:
        SurveyDataset: Deterministic in (cfg, truth, seed)

    Raises:
        ConfigError: If truth does not match cfg

    Examples:
        >>> cfg = SynthConfig(n_fsu=50)
        >>> truth = make_ground_truth(cfg, seed=7)
        >>> generate(cfg, truth, seed=7) == generate(cfg, truth, seed=7)
        True

    Version: 0.1.0
    """
    truth.check(cfg)
    fsu_width = max(5, len(str(cfg.n_fsu)))
    households: list[HouseholdRecord] = []
    observations: list[ItemObservation] = []
    for fsu in range(cfg.n_fsu):
        recs, obs = _generate_fsu(cfg, truth, seed, fsu, fsu_width)
        households.extend(recs)
        observations.extend(obs)
    return SurveyDataset(households, observations)


def load_synthetic_spec(data: Mapping[str, Any], seed: int) -> tuple[SynthConfig, GroundTruth]:
    """
    Read {"synth": {...}, "truth": {...}} into a SynthConfig and GroundTruth.

    The truth block accepts the keyword arguments of make_ground_truth;
    missing entries take its defaults.
    """
    unknown = set(data) - {"synth", "truth"}
    if unknown:
        raise ConfigError(f"Unknown synthetic keys: {sorted(unknown)}")
    cfg = SynthConfig.from_dict(data.get("synth", {}))
    truth_kwargs = dict(data.get("truth", {}))
    allowed = {
        "sector_effects",
        "state_effects",
        "gamma_size",
        "gamma_price",
        "gamma_expenditure",
        "consumption_probs",
    }
    bad = set(truth_kwargs) - allowed
    if bad:
        raise ConfigError(f"Unknown truth keys: {sorted(bad)}")
    return cfg, make_ground_truth(cfg, seed, **truth_kwargs)
