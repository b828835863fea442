"""
Metadata:
    Project: ThinPrice
    File Name: inference.py
    File Path: thinprice/core/inference.py
    Module: Demand Regression
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Log-log demand regressions on one item, the measurement-error
    correction for the substituted price, and model-predicted budget
    shares.

    Three model kinds share one design layout:

    - actual_price:           log Q ~ sector + state + S + log P + log E
    - star_price:             log Q ~ sector + state + S + log P* + log E
    - star_price_decomposed:  log Q ~ sector + state + S + log P + log E
                                      + log(P*/P)

    Sector and state enter as reference-level dummies next to an explicit
    intercept. Columns with zero variance are dropped and recorded; any
    remaining rank deficiency is an error naming the collinear columns.

Bias correction:
    With observed regressor X = X_true + V, where V is zero except for the
    price column (V = log P* - log P per row), the corrected estimator is

        beta* = (X'X - V'V)^(-1) X'X beta_hat

    which equals [I - (X'X)^(-1) V'V]^(-1) beta_hat. V'V holds sum v^2 in
    the price-diagonal slot and zeros elsewhere, so the correction also
    reduces to beta_hat + (sum v^2) beta_hat[k] (X'X - V'V)^(-1) e_k.

Contents:
    Classes:
        - ModelKind, PriceChoice: Enumerations
        - ModelSpec: Model kind and factor reference levels
        - DesignMatrix: Named columns, response and dropped columns
        - FitResult: OLS fit with diagnostics
        - MeasurementErrorInfo: V column and V'V

    Functions:
        - build_design / design_from_frame: Assemble a design matrix
        - ols_fit: Least squares with a condition-number gate
        - bias_correct: Corrected coefficients
        - single_column_correction: Closed form for one error column
        - predicted_shares / shares_from_frame: Model-predicted budget shares
        - empirical_ci, ci_ranks: Order-statistic intervals
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence

import numpy as np
import scipy.linalg

from thinprice.core.sampling import StarPricedObservation
from thinprice.errors import (
    BiasCorrectionUnstableError,
    ConfigError,
    DataError,
    DatasetMismatchError,
    RankDeficiencyError,
    SingularSystemError,
)
from thinprice.precision import is_constant, relative_error, snap_to_integer
from thinprice.survey.dataset import HouseholdKey, ItemFrame, SurveyDataset

logger = logging.getLogger(__name__)

DEFAULT_CONDITION_CAP = 1e12

INTERCEPT = "intercept"
HH_SIZE = "hh_size"
LOG_PRICE = "log_price"
LOG_STAR_PRICE = "log_star_price"
LOG_MPCE = "log_mpce"
LOG_PRICE_RATIO = "log_price_ratio"


class ModelKind(str, Enum):
    ACTUAL_PRICE = "actual_price"
    STAR_PRICE_DECOMPOSED = "star_price_decomposed"
    STAR_PRICE = "star_price"


class PriceChoice(str, Enum):
    ACTUAL = "actual"
    STAR = "star"


@dataclass(frozen=True)
class ModelSpec:
    """
    Model kind plus factor reference levels.

    A reference left as None resolves to the alphabetically first level
    present among the item's consuming households.
    """

    kind: ModelKind = ModelKind.ACTUAL_PRICE
    sector_reference: Optional[str] = None
    state_reference: Optional[str] = None

    @property
    def price_column(self) -> str:
        return LOG_STAR_PRICE if self.kind is ModelKind.STAR_PRICE else LOG_PRICE


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """
    Regression design for one item.

    Attributes:
        columns (tuple[str, ...]): Retained column names, in matrix order
        matrix (np.ndarray): n x k design
        response (np.ndarray): log Q, length n
        dropped (tuple[tuple[str, str], ...]): (column, reason) pairs
        kind (ModelKind): Model the design belongs to
        keys (tuple[HouseholdKey, ...]): Row households (empty for raw arrays)
        references (dict[str, str]): Resolved factor reference levels
    """

    columns: tuple[str, ...]
    matrix: np.ndarray
    response: np.ndarray
    dropped: tuple[tuple[str, str], ...] = ()
    kind: Optional[ModelKind] = None
    item: Optional[int] = None
    keys: tuple[HouseholdKey, ...] = ()
    references: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_arrays(
        cls, matrix: Any, response: Any, columns: Optional[Sequence[str]] = None
    ) -> DesignMatrix:
        """Wrap raw arrays; columns default to x0, x1, ..."""
        x = np.asarray(matrix, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(response, dtype=float)
        if x.shape[0] != y.shape[0]:
            raise DataError(f"Design has {x.shape[0]} rows but response has {y.shape[0]}")
        names = tuple(columns) if columns is not None else tuple(f"x{j}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise DataError(f"{len(names)} column names for {x.shape[1]} columns")
        return cls(columns=names, matrix=x, response=y)

    @property
    def n_rows(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def dropped_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.dropped)

    def column(self, name: str) -> np.ndarray:
        return self.matrix[:, self.columns.index(name)]


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Ordinary least squares fit.

    Attributes:
        columns (tuple[str, ...]): Coefficient names
        coefficients (np.ndarray): Estimates, aligned with columns
        residuals (np.ndarray): y - X beta
        fitted_log_q (np.ndarray): X beta
        gram_matrix (np.ndarray): X'X
        condition_number (float): Ratio of extreme singular values of X
        dropped_columns (tuple[tuple[str, str], ...]): (column, reason)
        kind (ModelKind | None): Model kind
        keys (tuple[HouseholdKey, ...]): Row households
    """

    columns: tuple[str, ...]
    coefficients: np.ndarray
    residuals: np.ndarray
    fitted_log_q: np.ndarray
    gram_matrix: np.ndarray
    condition_number: float
    dropped_columns: tuple[tuple[str, str], ...] = ()
    kind: Optional[ModelKind] = None
    keys: tuple[HouseholdKey, ...] = ()

    @property
    def n_rows(self) -> int:
        return int(self.residuals.shape[0])

    def coefficient(self, name: str) -> float:
        try:
            return float(self.coefficients[self.columns.index(name)])
        except ValueError:
            raise KeyError(
                f"No coefficient named {name!r}; columns are {list(self.columns)}"
            ) from None

    def has(self, name: str) -> bool:
        return name in self.columns

    def named(self) -> dict[str, float]:
        return {name: float(b) for name, b in zip(self.columns, self.coefficients)}

    def to_summary(self) -> dict[str, Any]:
        """JSON-ready summary of the fit."""
        return {
            "kind": self.kind.value if self.kind else None,
            "n_rows": self.n_rows,
            "coefficients": self.named(),
            "dropped_columns": [{"column": c, "reason": r} for c, r in self.dropped_columns],
            "condition_number": self.condition_number,
            "residual_sum_of_squares": float(self.residuals @ self.residuals),
        }


@dataclass(frozen=True, eq=False)
class MeasurementErrorInfo:
    """
    Error column V for the price regressor.

    Attributes:
        v_column (np.ndarray): log P* - log P per design row
        vtv (float): sum v^2
        column (str): Design column the error sits in
    """

    v_column: np.ndarray
    vtv: float
    column: str = LOG_STAR_PRICE

    @classmethod
    def from_column(cls, v: Any, column: str = LOG_STAR_PRICE) -> MeasurementErrorInfo:
        arr = np.asarray(v, dtype=float)
        return cls(v_column=arr, vtv=float(arr @ arr), column=column)

    def to_dict(self) -> dict[str, Any]:
        return {"column": self.column, "vtv": self.vtv, "rows": int(self.v_column.size)}


# ===== DESIGN =====


def _resolve_reference(
    values: np.ndarray, reference: Optional[str], factor: str
) -> tuple[list[str], str]:
    levels = sorted(set(values.tolist()))
    if reference is None:
        return levels, levels[0]
    if reference not in levels:
        raise ConfigError(f"{factor} reference level {reference!r} not among levels {levels}")
    return levels, reference


def _check_rank(columns: list[str], x: np.ndarray) -> None:
    _, r, piv = scipy.linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0:
        return
    tol = max(x.shape) * np.finfo(float).eps * diag[0]
    rank = int(np.sum(diag > tol))
    if rank < x.shape[1]:
        collinear = [columns[j] for j in piv[rank:]]
        raise RankDeficiencyError(collinear, rank, x.shape[1])


def design_from_frame(
    frame: ItemFrame,
    spec: ModelSpec,
    star_price: Optional[np.ndarray] = None,
    log_ratio: Optional[np.ndarray] = None,
) -> DesignMatrix:
    """
    Assemble the design for spec from a columnar item view.

    Args:
        frame (ItemFrame): Item view, rows in canonical order
        spec (ModelSpec): Model kind and references
        star_price (np.ndarray, optional): P* per row (star_price kind)
        log_ratio (np.ndarray, optional): log(P*/P) per row (decomposed kind)

    Raises:
        DatasetMismatchError: If a needed star column is missing or misaligned
        ConfigError: If a reference level is absent
        RankDeficiencyError: If retained columns are collinear
    """
    n = frame.n_rows
    if spec.kind is ModelKind.STAR_PRICE and (star_price is None or len(star_price) != n):
        raise DatasetMismatchError(f"star_price model needs P* for all {n} rows")
    if spec.kind is ModelKind.STAR_PRICE_DECOMPOSED and (log_ratio is None or len(log_ratio) != n):
        raise DatasetMismatchError(f"star_price_decomposed model needs log(P*/P) for all {n} rows")

    sector_levels, sector_ref = _resolve_reference(frame.sector, spec.sector_reference, "sector")
    state_levels, state_ref = _resolve_reference(frame.state, spec.state_reference, "state")

    candidates: list[tuple[str, np.ndarray]] = [(INTERCEPT, np.ones(n))]
    candidates += [
        (f"sector[{lvl}]", (frame.sector == lvl).astype(float))
        for lvl in sector_levels
        if lvl != sector_ref
    ]
    candidates += [
        (f"state[{lvl}]", (frame.state == lvl).astype(float))
        for lvl in state_levels
        if lvl != state_ref
    ]
    candidates.append((HH_SIZE, frame.hh_size))
    if spec.kind is ModelKind.STAR_PRICE:
        candidates.append((LOG_STAR_PRICE, np.log(star_price)))  # type: ignore[arg-type]
    else:
        candidates.append((LOG_PRICE, np.log(frame.price)))
    candidates.append((LOG_MPCE, np.log(frame.mpce)))
    if spec.kind is ModelKind.STAR_PRICE_DECOMPOSED:
        candidates.append((LOG_PRICE_RATIO, np.asarray(log_ratio, dtype=float)))

    columns: list[str] = []
    kept: list[np.ndarray] = []
    dropped: list[tuple[str, str]] = []
    for name, values in candidates:
        if name != INTERCEPT and is_constant(values):
            dropped.append((name, "zero-variance"))
            continue
        columns.append(name)
        kept.append(values)
    if dropped:
        logger.debug("Item %d: dropped columns %s", frame.item, [c for c, _ in dropped])

    x = np.column_stack(kept)
    _check_rank(columns, x)
    return DesignMatrix(
        columns=tuple(columns),
        matrix=x,
        response=np.log(frame.quantity),
        dropped=tuple(dropped),
        kind=spec.kind,
        item=frame.item,
        keys=frame.keys,
        references={"sector": sector_ref, "state": state_ref},
    )


def build_design(
    ds: SurveyDataset,
    item: int,
    spec: ModelSpec,
    star: Optional[Sequence[StarPricedObservation]] = None,
) -> DesignMatrix:
    """
    Design matrix for one item of a dataset.

    Args:
        ds (SurveyDataset): Dataset
        item (int): Item code
        spec (ModelSpec): Model kind and references
        star (Sequence[StarPricedObservation], optional): Required for the
            star kinds; must cover every consuming observation in order

    Returns:
        DesignMatrix: One row per consuming observation

    Raises:
        UnknownItemError: If the item is absent
        DatasetMismatchError: If star does not line up with the observations
        RankDeficiencyError: On collinear columns after pruning

    Examples:
        >>> design = build_design(ds, 101, ModelSpec(ModelKind.ACTUAL_PRICE))  # doctest: +SKIP
        >>> design.columns                                                      # doctest: +SKIP
        ('intercept', 'sector[urban]', 'state[02]', 'state[03]', 'hh_size', 'log_price', 'log_mpce')

    Version: 0.1.0
    """
    frame = ds.item_frame(item)
    star_price = log_ratio = None
    if star is not None:
        if tuple(s.key for s in star) != frame.keys:
            raise DatasetMismatchError(
                f"Star-priced observations do not match item {item}'s observations"
            )
        star_price = np.array([s.star_price for s in star], dtype=float)
        log_ratio = np.array([s.log_price_ratio for s in star], dtype=float)
    return design_from_frame(frame, spec, star_price, log_ratio)


# ===== FITTING =====


def ols_fit(design: DesignMatrix, condition_cap: float = DEFAULT_CONDITION_CAP) -> FitResult:
    """
    Least-squares fit of design.response on design.matrix.

    Solved by SVD (numpy.linalg.lstsq); the condition number is the ratio
    of the largest to the smallest singular value of X.

    Raises:
        SingularSystemError: If the condition number exceeds condition_cap

    Examples:
        >>> fit = ols_fit(DesignMatrix.from_arrays([[1.0], [2.0]], [2.0, 4.0]))
        >>> fit.coefficient("x0")
        2.0
    """
    x, y = design.matrix, design.response
    beta, _, _, sv = np.linalg.lstsq(x, y, rcond=None)
    smallest = float(sv[-1]) if sv.size else 0.0
    cond = math.inf if smallest == 0.0 else float(sv[0]) / smallest
    if not cond <= condition_cap:
        raise SingularSystemError(cond, condition_cap)
    fitted = x @ beta
    return FitResult(
        columns=design.columns,
        coefficients=beta,
        residuals=y - fitted,
        fitted_log_q=fitted,
        gram_matrix=x.T @ x,
        condition_number=cond,
        dropped_columns=design.dropped,
        kind=design.kind,
        keys=design.keys,
    )


def _error_gram(fit: FitResult, me: MeasurementErrorInfo) -> tuple[int, np.ndarray]:
    if me.column not in fit.columns:
        raise DatasetMismatchError(
            f"Fit has no column {me.column!r} to correct; columns are {list(fit.columns)}"
        )
    if me.v_column.size != fit.n_rows:
        raise DatasetMismatchError(f"V column has {me.v_column.size} rows, fit has {fit.n_rows}")
    k = fit.columns.index(me.column)
    vtv = np.zeros_like(fit.gram_matrix)
    vtv[k, k] = me.vtv
    return k, vtv


def bias_correct(
    fit: FitResult,
    me: MeasurementErrorInfo,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> dict[str, float]:
    """
    Measurement-error corrected coefficients (X'X - V'V)^(-1) X'X beta_hat.

    Args:
        fit (FitResult): Naive fit on the error-contaminated regressor
        me (MeasurementErrorInfo): Error column and V'V
        condition_cap (float): Largest tolerated condition of X'X - V'V

    Returns:
        dict[str, float]: Corrected coefficient per column name

    Raises:
        DatasetMismatchError: If me does not belong to fit
        BiasCorrectionUnstableError: If X'X - V'V is singular, badly
            conditioned, or the equivalent forms disagree

    Notes:
        The result is checked against [I - (X'X)^(-1) V'V]^(-1) beta_hat
        and the single-column closed form; both must agree within
        max(1e-10, 100 eps cond) relative.

    Version: 0.1.0
    """
    if me.vtv == 0.0:
        return fit.named()
    k, vtv = _error_gram(fit, me)
    gram = fit.gram_matrix
    a = gram - vtv
    cond = float(np.linalg.cond(a))
    if not cond <= condition_cap:
        raise BiasCorrectionUnstableError(
            f"bias correction unstable: cond(X'X - V'V) = {cond:.3e}"
            f" exceeds cap {condition_cap:.1e}"
        )
    beta = fit.coefficients
    corrected = np.linalg.solve(a, gram @ beta)

    identity = np.eye(gram.shape[0])
    via_inverse = np.linalg.solve(identity - np.linalg.solve(gram, vtv), beta)
    closed_form = beta + me.vtv * beta[k] * np.linalg.solve(a, identity[:, k])
    tol = max(1e-10, 100.0 * np.finfo(float).eps * max(cond, float(np.linalg.cond(gram))))
    for label, other in (("inverse", via_inverse), ("single-column", closed_form)):
        err = relative_error(other, corrected)
        if err > tol:
            raise BiasCorrectionUnstableError(
                f"bias correction unstable: {label} form differs by {err:.2e} (tolerance {tol:.1e})"
            )
    return {name: float(b) for name, b in zip(fit.columns, corrected)}


def single_column_correction(fit: FitResult, me: MeasurementErrorInfo) -> dict[str, float]:
    """
    beta_hat + (sum v^2) beta_hat[k] (X'X - V'V)^(-1) e_k.

    Closed form of bias_correct when only column k carries error; no
    stability checks beyond the solve itself.
    """
    if me.vtv == 0.0:
        return fit.named()
    k, vtv = _error_gram(fit, me)
    try:
        step = np.linalg.solve(fit.gram_matrix - vtv, np.eye(len(fit.columns))[:, k])
    except np.linalg.LinAlgError as exc:
        raise BiasCorrectionUnstableError(f"bias correction unstable: {exc}") from exc
    corrected = fit.coefficients + me.vtv * fit.coefficients[k] * step
    return {name: float(b) for name, b in zip(fit.columns, corrected)}


# ===== SHARES =====


def shares_from_frame(frame: ItemFrame, fitted_log_q: np.ndarray, price: np.ndarray) -> np.ndarray:
    """(price * exp(fitted log Q) / hh_size) / mpce per row."""
    return price * np.exp(fitted_log_q) / frame.hh_size / frame.mpce


def predicted_shares(
    fit: FitResult,
    ds: SurveyDataset,
    item: int,
    price_choice: PriceChoice = PriceChoice.ACTUAL,
    star: Optional[Sequence[StarPricedObservation]] = None,
) -> np.ndarray:
    """
    Model-predicted budget share per consuming observation.

    Q_hat = exp(fitted log Q), v_hat = price * Q_hat with the actual price
    or P* per price_choice, share = (v_hat / hh_size) / mpce. No
    retransformation correction is applied.

    Raises:
        DatasetMismatchError: If fit rows or star do not match the item's
            observations, or PriceChoice.STAR is requested without star

    Examples:
        >>> shares = predicted_shares(fit, ds, 101, PriceChoice.ACTUAL)  # doctest: +SKIP
    """
    frame = ds.item_frame(item)
    if fit.n_rows != frame.n_rows or (fit.keys and fit.keys != frame.keys):
        raise DatasetMismatchError(f"Fit does not correspond to item {item}'s observations")
    if price_choice is PriceChoice.STAR:
        if star is None or tuple(s.key for s in star) != frame.keys:
            raise DatasetMismatchError("Star-priced shares need star prices for every observation")
        price = np.array([s.star_price for s in star], dtype=float)
    else:
        price = frame.price
    return shares_from_frame(frame, fit.fitted_log_q, price)


# ===== ORDER STATISTICS =====


def ci_ranks(repetitions: int, level: float = 0.95) -> tuple[int, int]:
    """
    1-indexed order-statistic ranks of an equal-tailed interval.

    Examples:
        >>> ci_ranks(1000)
        (25, 975)
        >>> ci_ranks(200)
        (5, 195)
    """
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must lie in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    lo = max(1, int(round(snap_to_integer(repetitions * tail))))
    hi = min(repetitions, max(lo, int(round(snap_to_integer(repetitions * (1.0 - tail))))))
    return lo, hi


def empirical_ci(values: Any, lo_rank: int = 25, hi_rank: int = 975) -> tuple[float, float]:
    """
    Order statistics lo_rank and hi_rank (1-indexed, ascending).

    Raises:
        DataError: If fewer than hi_rank values are given or ranks are invalid

    Examples:
        >>> empirical_ci(range(1000, 0, -1))
        (25.0, 975.0)
    """
    if not isinstance(values, np.ndarray):
        values = list(values)
    arr = np.sort(np.asarray(values, dtype=float))
    if not 1 <= lo_rank <= hi_rank:
        raise DataError(f"Invalid ranks ({lo_rank}, {hi_rank})")
    if arr.size < hi_rank:
        raise DataError(f"Need at least {hi_rank} values for an empirical interval, got {arr.size}")
    return float(arr[lo_rank - 1]), float(arr[hi_rank - 1])
