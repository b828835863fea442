"""
Metadata:
    Project: ThinPrice
    File Name: prevalence.py
    File Path: thinprice/core/prevalence.py
    Module: Prevalence Probabilities
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Probability that a thin sample (one household per FSU) sees an item in
    at least 100q% of FSUs. With Y_i ~ Bernoulli(p_i) the indicator that
    the household picked in FSU i consumes the item, X = sum Y_i follows a
    Poisson-Binomial distribution and the prevalence probability is
    P(X >= Nq).

    Two evaluations are offered:

    - exact: the pmf of X by iterative convolution, O(N^2), capped at N
      (default 20000)
    - approximate: the central-limit form 1 - Phi((Nq - sum p_i) / sqrt(S_N))
      with S_N = sum p_i (1 - p_i), optionally with a half-unit continuity
      correction

    The Lyapunov ratio bound S_N^(-1/2) tells how far the normal form can
    be trusted: small values mean many FSUs with non-degenerate p_i.

Contents:
    Classes:
        - PrevalenceInput: Validated vector of p_i
        - PrevalenceResult: One row of the prevalence report

    Functions:
        - estimate_fsu_probs: Share of consuming households per FSU
        - exact_pmf: Poisson-Binomial pmf by convolution
        - threshold_count: ceil(Nq) with ulp noise removed
        - prevalence_exact: Tail mass at or above the threshold
        - prevalence_approx: Normal approximation of the tail
        - lyapunov_diagnostic: S_N^(-1/2)
        - prevalence_report: Results for several q

Usage:
    >>> from thinprice.core.prevalence import PrevalenceInput, prevalence_exact
    >>> prevalence_exact(PrevalenceInput.of([0.5, 0.5]), 0.5)
    0.75
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from scipy.special import ndtr

from thinprice.errors import (
    ConfigError,
    DataError,
    DegenerateDistributionError,
    ExactComputationCapError,
)
from thinprice.precision import snap_to_integer
from thinprice.survey.dataset import SurveyDataset

logger = logging.getLogger(__name__)

DEFAULT_EXACT_CAP = 20000
DEFAULT_Q_LEVELS = (0.5, 0.4, 0.3)


@dataclass(frozen=True, eq=False)
class PrevalenceInput:
    """
    Per-FSU consumption probabilities p_i.

    Attributes:
        probs (np.ndarray): Read-only float vector, every entry in [0, 1]
        fsus (tuple[str, ...]): FSU identifiers aligned with probs, when known

    Raises:
        DataError: If probs is empty, not one-dimensional, or leaves [0, 1]
    """

    probs: np.ndarray
    fsus: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise DataError("PrevalenceInput needs a non-empty 1-D vector of probabilities")
        if not np.all((probs >= 0.0) & (probs <= 1.0)):
            raise DataError("Every p_i must lie in [0, 1]")
        if self.fsus and len(self.fsus) != probs.size:
            raise DataError(f"{len(self.fsus)} FSU ids for {probs.size} probabilities")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def of(cls, probs: Iterable[float]) -> PrevalenceInput:
        return cls(np.fromiter(probs, dtype=float))

    @property
    def n(self) -> int:
        return int(self.probs.size)

    @property
    def mean(self) -> float:
        return float(self.probs.sum())

    @property
    def variance(self) -> float:
        """S_N = sum p_i (1 - p_i)."""
        return float(np.sum(self.probs * (1.0 - self.probs)))


@dataclass(frozen=True)
class PrevalenceResult:
    """
    Prevalence at one threshold q.

    exact_prob is None when N exceeds the exact-computation cap.
    lyapunov_bound is infinite for a degenerate input (S_N = 0), whose
    approx_prob is then the deterministic tail (0 or 1).
    """

    q: float
    threshold: int
    exact_prob: Optional[float]
    approx_prob: float
    mean: float
    variance: float
    lyapunov_bound: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "threshold": self.threshold,
            "exact_prob": self.exact_prob,
            "approx_prob": self.approx_prob,
            "mean": self.mean,
            "variance": self.variance,
            "lyapunov_bound": self.lyapunov_bound,
        }


def _check_q(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise ConfigError(f"q must lie in (0, 1), got {q}")


def estimate_fsu_probs(ds: SurveyDataset, item: int) -> PrevalenceInput:
    """
    Estimate p_i as the fraction of households in FSU i consuming the item.

    Every FSU in the dataset contributes an entry, including FSUs where no
    household consumes the item (p_i = 0).

    Raises:
        UnknownItemError: If the item has no observation

    Examples:
        >>> estimate_fsu_probs(ds, 101).probs           # doctest: +SKIP
        array([0.75, 0.  , 1.  ])
    """
    ds.require_item(item)
    consuming = ds.fsu_index[item]
    fsus = ds.fsu_ids
    probs = np.array(
        [len(consuming.get(fsu, ())) / len(ds.households_in_fsu(fsu)) for fsu in fsus],
        dtype=float,
    )
    return PrevalenceInput(probs, fsus=fsus)


def exact_pmf(inp: PrevalenceInput, cap: int = DEFAULT_EXACT_CAP) -> np.ndarray:
    """
    Poisson-Binomial pmf of X = sum Y_i by iterative convolution.

    Args:
        inp (PrevalenceInput): p_1 .. p_N
        cap (int): Largest N computed exactly (default 20000)

    Returns:
        np.ndarray: pmf[k] = P(X = k), length N + 1, entries clamped to >= 0

    Raises:
        ExactComputationCapError: If N > cap

    Examples:
        >>> exact_pmf(PrevalenceInput.of([0.2, 0.7]))
        array([0.24, 0.62, 0.14])

    Version: 0.1.0
    """
    n = inp.n
    if n > cap:
        raise ExactComputationCapError(n, cap)
    pmf = np.zeros(n + 1, dtype=float)
    pmf[0] = 1.0
    # after step i the support is 0..i+1
    for i, p in enumerate(inp.probs):
        pmf[1 : i + 2] = pmf[1 : i + 2] * (1.0 - p) + pmf[: i + 1] * p
        pmf[0] *= 1.0 - p
    np.clip(pmf, 0.0, None, out=pmf)
    return pmf


def threshold_count(n: int, q: float) -> int:
    """
    Smallest count k with k >= Nq.

    N * q is snapped to the nearest integer first, so 1000 * 0.3 (which is
    300.00000000000006 in binary floating point) gives 300, not 301.

    Examples:
        >>> threshold_count(1000, 0.3)
        300
        >>> threshold_count(5, 0.5)
        3
    """
    _check_q(q)
    return int(math.ceil(snap_to_integer(n * q)))


def prevalence_exact(inp: PrevalenceInput, q: float, cap: int = DEFAULT_EXACT_CAP) -> float:
    """
    P(X >= ceil(Nq)) from the exact pmf.

    Raises:
        ConfigError: If q is outside (0, 1)
        ExactComputationCapError: If N > cap
    """
    k = threshold_count(inp.n, q)
    pmf = exact_pmf(inp, cap)
    return float(min(1.0, pmf[k:].sum()))


def prevalence_approx(inp: PrevalenceInput, q: float, continuity_correction: bool = False) -> float:
    """
    Normal approximation 1 - Phi(z), z = (Nq - sum p_i) / sqrt(S_N).

    Args:
        inp (PrevalenceInput): p_1 .. p_N
        q (float): Threshold fraction in (0, 1)
        continuity_correction (bool): Use z = (ceil(Nq) - 1/2 - sum p_i) / sqrt(S_N)

    Returns:
        float: Approximate P(X >= Nq) in [0, 1]

    Raises:
        DegenerateDistributionError: If S_N = 0

    Examples:
        >>> prevalence_approx(PrevalenceInput.of([0.5] * 10), 0.5)
        0.5

    Notes:
        Phi is scipy.special.ndtr; the upper tail is taken as ndtr(-z)
        to keep full relative accuracy far in the tail.

    Version: 0.1.0
    """
    _check_q(q)
    s_n = inp.variance
    if s_n <= 0.0:
        raise DegenerateDistributionError()
    if continuity_correction:
        target = threshold_count(inp.n, q) - 0.5
    else:
        target = inp.n * q
    z = (target - inp.mean) / math.sqrt(s_n)
    return float(ndtr(-z))


def lyapunov_diagnostic(inp: PrevalenceInput) -> float:
    """
    Lyapunov ratio bound S_N^(-1/2).

    Since |Y_i - p_i| <= 1, sum E|Y_i - p_i|^3 <= S_N, so the Lyapunov
    ratio is at most S_N^(-1/2).

    Raises:
        DegenerateDistributionError: If S_N = 0

    Examples:
        >>> lyapunov_diagnostic(PrevalenceInput.of([0.5] * 100))
        0.2
    """
    s_n = inp.variance
    if s_n <= 0.0:
        raise DegenerateDistributionError()
    return 1.0 / math.sqrt(s_n)


def prevalence_report(
    inp: PrevalenceInput,
    q_levels: Sequence[float] = DEFAULT_Q_LEVELS,
    cap: int = DEFAULT_EXACT_CAP,
    continuity_correction: bool = False,
) -> list[PrevalenceResult]:
    """
    Prevalence results for every q in q_levels, in the given order.

    The pmf is computed once and shared across thresholds. Above the cap
    exact_prob is None; a degenerate input reports the deterministic tail
    as approx_prob with an infinite Lyapunov bound.
    """
    for q in q_levels:
        _check_q(q)
    pmf: Optional[np.ndarray] = None
    if inp.n <= cap:
        pmf = exact_pmf(inp, cap)
    else:
        logger.info("N=%d above exact cap %d; reporting normal approximation only", inp.n, cap)

    degenerate = inp.variance <= 0.0
    bound = math.inf if degenerate else lyapunov_diagnostic(inp)
    results = []
    for q in q_levels:
        k = threshold_count(inp.n, q)
        exact = None if pmf is None else float(min(1.0, pmf[k:].sum()))
        if degenerate:
            approx = 1.0 if inp.mean >= k else 0.0
        else:
            approx = prevalence_approx(inp, q, continuity_correction)
        results.append(
            PrevalenceResult(
                q=float(q),
                threshold=k,
                exact_prob=exact,
                approx_prob=approx,
                mean=inp.mean,
                variance=inp.variance,
                lyapunov_bound=bound,
            )
        )
    return results
