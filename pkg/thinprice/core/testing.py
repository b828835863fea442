"""
Metadata:
    Project: ThinPrice
    File Name: testing.py
    File Path: thinprice/core/testing.py
    Module: Repeated Kolmogorov-Smirnov Procedure
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Decides whether thin price sampling preserves the predicted budget
    share distribution of an item.

    Every repetition draws a fresh thin sample, fits the decomposed model,
    and compares the predicted shares of the full-price model (F) against
    those of the substituted-price model (G) with a two-sample KS test.
    Over R repetitions each p-value is below alpha with probability alpha
    under H0: F = G, so Z = #{p_r < alpha} ~ Binomial(R, alpha). H0 is
    rejected iff the c-th smallest p-value is below alpha (Z >= c), where c
    is the (1 - meta_alpha) quantile of Z.

Contents:
    Classes:
        - KsResult: Two-sample KS statistic and p-value
        - Decision: accept | reject
        - RepeatedTestResult: Outcome of the repeated procedure

    Functions:
        - ks_two_sample: Tie-aware two-sample KS test
        - rejection_rank: Binomial cutoff c
        - criterion_size: Exact size P(Z >= c) under H0
        - rejects: Order-statistic decision
        - repeated_ks_procedure: Full per-item study

Notes:
    c is the smallest integer with P(Z > c) <= meta_alpha. With R = 1000
    and alpha = meta_alpha = 0.05 this gives c = 62: P(Z > 61) is about
    0.0511 and P(Z > 62) about 0.0384. The decision counts Z >= c, so its
    exact size is P(Z > 61), slightly above meta_alpha.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import binom

from thinprice.core.inference import (
    DEFAULT_CONDITION_CAP,
    LOG_PRICE,
    LOG_PRICE_RATIO,
    LOG_STAR_PRICE,
    MeasurementErrorInfo,
    ModelKind,
    ModelSpec,
    bias_correct,
    ci_ranks,
    design_from_frame,
    empirical_ci,
    ols_fit,
    shares_from_frame,
)
from thinprice.core.sampling import RepetitionPlan, repetition_seeds, select_rows, star_prices
from thinprice.errors import BiasCorrectionUnstableError, ConfigError, DataError
from thinprice.survey.dataset import ItemFrame, SurveyDataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n1: int
    n2: int


class Decision(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"


def ks_two_sample(x: Any, y: Any) -> KsResult:
    """
    Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    D is the largest gap between the right-continuous empirical CDFs,
    evaluated at every pooled sample point, so tied values are handled
    exactly. The p-value is the Kolmogorov survival function at
    D * sqrt(n1 n2 / (n1 + n2)).

    Args:
        x, y: One-dimensional finite samples, each non-empty

    Returns:
        KsResult: D in [0, 1], p-value in [0, 1]

    Raises:
        DataError: If a sample is empty or holds non-finite values

    Examples:
        >>> ks_two_sample([1.0, 2.0], [3.0, 4.0]).statistic
        1.0
        >>> ks_two_sample([1.0, 2.0], [1.0, 2.0]).p_value
        1.0

    Version: 0.1.0
    """
    xs = np.sort(np.asarray(x, dtype=float).ravel())
    ys = np.sort(np.asarray(y, dtype=float).ravel())
    if xs.size == 0 or ys.size == 0:
        raise DataError("KS test needs two non-empty samples")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DataError("KS test samples must be finite")
    n1, n2 = xs.size, ys.size
    pooled = np.concatenate([xs, ys])
    cdf_x = np.searchsorted(xs, pooled, side="right") / n1
    cdf_y = np.searchsorted(ys, pooled, side="right") / n2
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    p = float(kolmogorov(d * math.sqrt(n1 * n2 / (n1 + n2))))
    return KsResult(statistic=d, p_value=min(1.0, max(0.0, p)), n1=int(n1), n2=int(n2))


def rejection_rank(repetitions: int, alpha: float = 0.05, meta_alpha: float = 0.05) -> int:
    """
    Smallest c with P(Binomial(repetitions, alpha) > c) <= meta_alpha.

    This is the (1 - meta_alpha) quantile of Z, floored at 1. Tails come
    from scipy.stats.binom.sf, which evaluates the regularized incomplete
    beta function rather than summing pmf terms.

    Returns:
        int: c in 1..repetitions

    Examples:
        >>> rejection_rank(1000, 0.05, 0.05)
        62
        >>> rejection_rank(20, 0.5, 0.05)
        14
    """
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    for name, value in (("alpha", alpha), ("meta_alpha", meta_alpha)):
        if not 0.0 < value < 1.0:
            raise ConfigError(f"{name} must lie in (0, 1), got {value}")
    # tails[c] = P(Z > c) for c = 0 .. repetitions; the last entry is 0
    tails = binom.sf(np.arange(repetitions + 1), repetitions, alpha)
    return max(1, int(np.argmax(tails <= meta_alpha)))


def criterion_size(repetitions: int, alpha: float, rank: int) -> float:
    """Exact P(Binomial(repetitions, alpha) >= rank)."""
    return float(binom.sf(rank - 1, repetitions, alpha))


def rejects(p_values: Any, alpha: float, rank: int) -> bool:
    """
    True iff the rank-th smallest p-value (1-indexed) is below alpha.

    Equivalent to at least rank p-values lying below alpha.
    """
    ordered = np.sort(np.asarray(p_values, dtype=float))
    if rank < 1 or rank > ordered.size:
        return False
    return bool(ordered[rank - 1] < alpha)


def _interval(values: np.ndarray) -> Optional[tuple[float, float]]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return None
    return empirical_ci(finite, *ci_ranks(finite.size))


@dataclass(frozen=True, eq=False)
class RepeatedTestResult:
    """
    Outcome of the repeated KS procedure for one item.

    Attributes:
        item (int): Item code
        p_values (np.ndarray): KS p-value per repetition, in repetition order
        criterion_rank (int): c from rejection_rank
        decision (Decision): Reject iff ordered_p_values[c - 1] < alpha
        delta4_values, delta5_values (np.ndarray): Price and elasticity
            coefficients of the decomposed model per repetition
        naive_star_values, corrected_star_values (np.ndarray): Coefficient
            of log P* in the substituted-price model, before and after the
            measurement-error correction (NaN where the correction failed)
        degenerate (np.ndarray): Repetitions whose log(P*/P) column had
            zero variance (delta5 = 0, p = 1)
        ks_statistics (np.ndarray): D per repetition
        gamma2 (float): Price coefficient of the full-data model
        sample_size (int): Regression rows (consuming observations)
        n_fsus (int): FSUs with at least one consumer
        ci_ranks (tuple[int, int]): Order statistics used for intervals
    """

    item: int
    p_values: np.ndarray
    criterion_rank: int
    alpha: float
    meta_alpha: float
    decision: Decision
    delta4_values: np.ndarray
    delta5_values: np.ndarray
    naive_star_values: np.ndarray
    corrected_star_values: np.ndarray
    degenerate: np.ndarray
    ks_statistics: np.ndarray
    gamma2: float
    sample_size: int
    n_fsus: int
    plan: RepetitionPlan
    ci_ranks: tuple[int, int]
    full_fit: dict[str, Any] = field(default_factory=dict)

    @property
    def repetitions(self) -> int:
        return int(self.p_values.size)

    @property
    def ordered_p_values(self) -> np.ndarray:
        return np.sort(self.p_values)

    @property
    def p_value_at_rank(self) -> Optional[float]:
        """c-th smallest p-value, None when c exceeds R."""
        if self.criterion_rank > self.repetitions:
            return None
        return float(self.ordered_p_values[self.criterion_rank - 1])

    @property
    def rejection_count(self) -> int:
        return int(np.sum(self.p_values < self.alpha))

    @property
    def n_degenerate(self) -> int:
        return int(self.degenerate.sum())

    @property
    def delta4_ci(self) -> tuple[float, float]:
        return empirical_ci(self.delta4_values, *self.ci_ranks)

    @property
    def delta5_ci(self) -> tuple[float, float]:
        return empirical_ci(self.delta5_values, *self.ci_ranks)

    @property
    def naive_star_ci(self) -> tuple[float, float]:
        return empirical_ci(self.naive_star_values, *self.ci_ranks)

    @property
    def corrected_star_ci(self) -> Optional[tuple[float, float]]:
        return _interval(self.corrected_star_values)

    @property
    def delta5_ci_contains_zero(self) -> bool:
        lo, hi = self.delta5_ci
        return lo <= 0.0 <= hi

    @property
    def delta4_ci_contains_gamma2(self) -> bool:
        lo, hi = self.delta4_ci
        return lo <= self.gamma2 <= hi

    def table3_row(self) -> dict[str, Any]:
        d5_lo, d5_hi = self.delta5_ci
        d4_lo, d4_hi = self.delta4_ci
        return {
            "item_code": self.item,
            "sample_size": self.sample_size,
            "p_value_at_rank_c": self.p_value_at_rank,
            "lcb_delta5": d5_lo,
            "ucb_delta5": d5_hi,
            "gamma2": self.gamma2,
            "lcb_delta4": d4_lo,
            "ucb_delta4": d4_hi,
            "decision": self.decision.value,
        }

    def to_dict(self) -> dict[str, Any]:
        corrected_ci = self.corrected_star_ci
        return {
            "item": self.item,
            "plan": self.plan.to_dict(),
            "alpha": self.alpha,
            "meta_alpha": self.meta_alpha,
            "criterion_rank": self.criterion_rank,
            "criterion_size": criterion_size(self.repetitions, self.alpha, self.criterion_rank),
            "decision": self.decision.value,
            "rejection_count": self.rejection_count,
            "p_value_at_rank": self.p_value_at_rank,
            "sample_size": self.sample_size,
            "n_fsus": self.n_fsus,
            "gamma2": self.gamma2,
            "ci_ranks": list(self.ci_ranks),
            "delta4_ci": list(self.delta4_ci),
            "delta5_ci": list(self.delta5_ci),
            "naive_star_ci": list(self.naive_star_ci),
            "corrected_star_ci": list(corrected_ci) if corrected_ci else None,
            "delta5_ci_contains_zero": self.delta5_ci_contains_zero,
            "delta4_ci_contains_gamma2": self.delta4_ci_contains_gamma2,
            "n_degenerate": self.n_degenerate,
            "full_fit": self.full_fit,
            "repetitions": {
                "p_value": self.p_values,
                "ks_statistic": self.ks_statistics,
                "delta4": self.delta4_values,
                "delta5": self.delta5_values,
                "naive_star": self.naive_star_values,
                "corrected_star": self.corrected_star_values,
                "degenerate": self.degenerate.astype(bool),
            },
        }


@dataclass(frozen=True)
class _Repetition:
    p_value: float
    statistic: float
    delta4: float
    delta5: float
    naive_star: float
    corrected_star: float
    degenerate: bool


def _run_repetition(
    frame: ItemFrame,
    references: dict[str, str],
    actual_shares: np.ndarray,
    seed: int,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> _Repetition:
    rows = select_rows(frame, np.random.default_rng(int(seed)))
    star, log_ratio = star_prices(frame, rows)

    decomposed = design_from_frame(
        frame,
        ModelSpec(ModelKind.STAR_PRICE_DECOMPOSED, references["sector"], references["state"]),
        log_ratio=log_ratio,
    )
    fit4 = ols_fit(decomposed, condition_cap)
    degenerate = LOG_PRICE_RATIO in decomposed.dropped_names
    delta5 = 0.0 if degenerate else fit4.coefficient(LOG_PRICE_RATIO)

    substituted = design_from_frame(
        frame,
        ModelSpec(ModelKind.STAR_PRICE, references["sector"], references["state"]),
        star_price=star,
    )
    fit_star = ols_fit(substituted, condition_cap)
    naive = fit_star.coefficient(LOG_STAR_PRICE)
    try:
        me = MeasurementErrorInfo.from_column(log_ratio)
        corrected = bias_correct(fit_star, me, condition_cap)[LOG_STAR_PRICE]
    except BiasCorrectionUnstableError as exc:
        logger.debug("Item %d seed %d: %s", frame.item, seed, exc)
        corrected = math.nan

    if degenerate:
        p_value, statistic = 1.0, 0.0
    else:
        star_shares = shares_from_frame(frame, fit4.fitted_log_q, star)
        ks = ks_two_sample(actual_shares, star_shares)
        p_value, statistic = ks.p_value, ks.statistic
    return _Repetition(
        p_value=p_value,
        statistic=statistic,
        delta4=fit4.coefficient(LOG_PRICE),
        delta5=delta5,
        naive_star=naive,
        corrected_star=corrected,
        degenerate=degenerate,
    )


def resolve_threads(threads: int) -> int:
    """0 means one worker per CPU."""
    if threads < 0:
        raise ConfigError(f"threads must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


def repeated_ks_procedure(
    ds: SurveyDataset,
    item: int,
    plan: RepetitionPlan,
    alpha: float = 0.05,
    meta_alpha: float = 0.05,
    threads: int = 1,
    spec: Optional[ModelSpec] = None,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> RepeatedTestResult:
    """
    Run the repeated KS study for one item.

    Args:
        ds (SurveyDataset): Dataset
        item (int): Item code (should survive screening)
        plan (RepetitionPlan): Master seed, R and salt
        alpha (float): Per-test level
        meta_alpha (float): Level of the order-statistic criterion
        threads (int): Worker threads, 0 = one per CPU
        spec (ModelSpec, optional): Reference levels; kind is ignored
        condition_cap (float): Largest tolerated condition number in every
            regression and bias correction

    Returns:
        RepeatedTestResult: Identical for identical inputs, whatever the
        thread count

    Raises:
        UnknownItemError: If the item is absent
        DataError: If log price does not vary for the item
        NumericalError: From any regression

    Examples:
        >>> res = repeated_ks_procedure(ds, 101, RepetitionPlan(7, 200))  # doctest: +SKIP
        >>> res.decision                                                   # doctest: +SKIP
        <Decision.ACCEPT: 'accept'>

    Version: 0.1.0
    """
    spec = spec or ModelSpec()
    frame = ds.item_frame(item)
    rank = rejection_rank(plan.repetitions, alpha, meta_alpha)

    full_design = design_from_frame(
        frame, ModelSpec(ModelKind.ACTUAL_PRICE, spec.sector_reference, spec.state_reference)
    )
    if LOG_PRICE not in full_design.columns:
        raise DataError(
            f"Item {item}: log price does not vary, price coefficient is not identified"
        )
    full_fit = ols_fit(full_design, condition_cap)
    gamma2 = full_fit.coefficient(LOG_PRICE)
    actual_shares = shares_from_frame(frame, full_fit.fitted_log_q, frame.price)

    seeds = repetition_seeds(plan)
    workers = resolve_threads(threads)
    logger.info(
        "Item %d: %d repetitions over %d rows / %d FSUs (c=%d, %d thread(s))",
        item,
        plan.repetitions,
        frame.n_rows,
        len(frame.fsus),
        rank,
        workers,
    )

    def task(seed: np.uint64) -> _Repetition:
        return _run_repetition(
            frame, full_design.references, actual_shares, int(seed), condition_cap
        )

    if workers == 1:
        reps = [task(seed) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reps = list(pool.map(task, seeds))

    p_values = np.array([r.p_value for r in reps])
    decision = Decision.REJECT if rejects(p_values, alpha, rank) else Decision.ACCEPT
    result = RepeatedTestResult(
        item=item,
        p_values=p_values,
        criterion_rank=rank,
        alpha=alpha,
        meta_alpha=meta_alpha,
        decision=decision,
        delta4_values=np.array([r.delta4 for r in reps]),
        delta5_values=np.array([r.delta5 for r in reps]),
        naive_star_values=np.array([r.naive_star for r in reps]),
        corrected_star_values=np.array([r.corrected_star for r in reps]),
        degenerate=np.array([r.degenerate for r in reps], dtype=bool),
        ks_statistics=np.array([r.statistic for r in reps]),
        gamma2=gamma2,
        sample_size=frame.n_rows,
        n_fsus=len(frame.fsus),
        plan=plan,
        ci_ranks=ci_ranks(plan.repetitions),
        full_fit=full_fit.to_summary(),
    )
    logger.info(
        "Item %d: %s (%d of %d p-values below %.3f, %d degenerate)",
        item,
        decision.value,
        result.rejection_count,
        plan.repetitions,
        alpha,
        result.n_degenerate,
    )
    return result
