"""
Metadata:
    Project: ThinPrice
    File Name: reports.py
    File Path: thinprice/pipeline/reports.py
    Module: Report Emitters
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Flat CSV and JSON artifacts of a run, plus Rich renderings of the
    prevalence and repeated-test tables. All writes are atomic and
    deterministic (floats in shortest round-trip form, sorted JSON keys).

Run directory layout:
    screening.json, screening_histograms.csv
    prevalence.csv              long: one row per (item, q)
    prevalence_table.csv        wide: one row per item, one column per q
    items/<item>/repeated_test.json
    items/<item>/p_values.csv
    items/<item>/selections/rep_<r>.csv   (when audits are enabled)
    table3.csv
    manifest.json, failures.json
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from rich.table import Table

from thinprice.core.prevalence import PrevalenceResult
from thinprice.core.sampling import repetition_seeds
from thinprice.core.testing import RepeatedTestResult
from thinprice.survey.screening import ScreeningReport
from thinprice.utils.io import atomic_write_json, atomic_write_text

# Table-2 convention: tail probabilities below this print as 0
DISPLAY_ZERO = 1e-6

PREVALENCE_COLUMNS = [
    "item_code",
    "q",
    "threshold",
    "exact_prob",
    "approx_prob",
    "mean",
    "variance",
    "lyapunov_bound",
]
TABLE3_COLUMNS = [
    "item_code",
    "sample_size",
    "p_value_at_rank_c",
    "lcb_delta5",
    "ucb_delta5",
    "gamma2",
    "lcb_delta4",
    "ucb_delta4",
    "decision",
]


def write_frame(path: Path, frame: pd.DataFrame) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def q_label(q: float) -> str:
    return f"q={q:g}"


# ===== SCREENING =====


def write_screening(out_dir: Path, report: ScreeningReport) -> list[Path]:
    histograms = pd.DataFrame(
        report.histogram_rows(), columns=["item_code", "bin_lo", "bin_hi", "count"]
    )
    return [
        atomic_write_json(out_dir / "screening.json", report.to_dict()),
        write_frame(out_dir / "screening_histograms.csv", histograms),
    ]


# ===== PREVALENCE =====


def prevalence_frame(results: dict[int, list[PrevalenceResult]]) -> pd.DataFrame:
    rows = [
        {"item_code": item, **res.to_dict()}
        for item, item_results in results.items()
        for res in item_results
    ]
    return pd.DataFrame(rows, columns=PREVALENCE_COLUMNS)


def prevalence_table(long: pd.DataFrame, q_levels: Sequence[float]) -> pd.DataFrame:
    """
    Wide item x q table of approximate prevalence probabilities.

    Values below 1e-6 are shown as 0; columns follow q_levels order.
    """
    if long.empty:
        return pd.DataFrame(columns=["item_code"] + [q_label(q) for q in q_levels])
    wide = long.pivot(index="item_code", columns="q", values="approx_prob")
    wide = wide.reindex(columns=list(q_levels))
    wide = wide.mask(wide < DISPLAY_ZERO, 0.0)
    wide.columns = [q_label(q) for q in wide.columns]
    return wide.reset_index()


def write_prevalence(
    out_dir: Path, results: dict[int, list[PrevalenceResult]], q_levels: Sequence[float]
) -> list[Path]:
    long = prevalence_frame(results)
    return [
        write_frame(out_dir / "prevalence.csv", long),
        write_frame(out_dir / "prevalence_table.csv", prevalence_table(long, q_levels)),
    ]


# ===== REPEATED TEST =====


def item_dir(out_dir: Path, item: int) -> Path:
    return out_dir / "items" / str(item)


def write_repeated(out_dir: Path, result: RepeatedTestResult) -> list[Path]:
    target = item_dir(out_dir, result.item)
    per_rep = pd.DataFrame(
        {
            "repetition": np.arange(1, result.repetitions + 1),
            "seed": repetition_seeds(result.plan),
            "p_value": result.p_values,
            "ks_statistic": result.ks_statistics,
            "delta4": result.delta4_values,
            "delta5": result.delta5_values,
            "naive_star": result.naive_star_values,
            "corrected_star": result.corrected_star_values,
            "degenerate": result.degenerate,
        }
    )
    return [
        atomic_write_json(target / "repeated_test.json", result.to_dict()),
        write_frame(target / "p_values.csv", per_rep),
    ]


def table3_frame(results: Iterable[RepeatedTestResult]) -> pd.DataFrame:
    return pd.DataFrame([r.table3_row() for r in results], columns=TABLE3_COLUMNS)


def write_table3(out_dir: Path, results: Iterable[RepeatedTestResult]) -> Path:
    return write_frame(out_dir / "table3.csv", table3_frame(results))


# ===== RENDERING =====


def _fmt(value: Any, digits: int = 4) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return ""
    if isinstance(value, (float, np.floating)):
        return f"{value:.{digits}f}"
    return str(value)


def render_prevalence(wide: pd.DataFrame, title: str = "Prevalence probabilities") -> Table:
    table = Table(title=title, border_style="green")
    table.add_column("Item", style="cyan", no_wrap=True)
    for column in wide.columns[1:]:
        table.add_column(str(column), justify="right")
    for row in wide.itertuples(index=False):
        table.add_row(str(row[0]), *(_fmt(v) for v in row[1:]))
    return table


def render_table3(frame: pd.DataFrame, title: str = "Repeated KS test") -> Table:
    table = Table(title=title, border_style="green")
    headers = {
        "item_code": "Item",
        "sample_size": "n",
        "p_value_at_rank_c": "p(c)",
        "lcb_delta5": "LCB d5",
        "ucb_delta5": "UCB d5",
        "gamma2": "gamma2",
        "lcb_delta4": "LCB d4",
        "ucb_delta4": "UCB d4",
        "decision": "Decision",
    }
    for column in TABLE3_COLUMNS:
        justify = "left" if column in ("item_code", "decision") else "right"
        table.add_column(headers[column], justify=justify)
    for row in frame.itertuples(index=False):
        cells = [_fmt(v) for v in row]
        decision = cells[-1]
        colour = "red" if decision == "reject" else "green"
        cells[-1] = f"[{colour}]{decision}[/{colour}]"
        table.add_row(*cells)
    return table


def read_run_tables(run_dir: Path) -> tuple[Optional[pd.DataFrame], Optional[pd.DataFrame]]:
    """
    Load prevalence.csv and table3.csv from a run directory.

    The prevalence frame is returned in wide form; either entry is None
    when its file is missing.
    """
    wide = None
    long_path = run_dir / "prevalence.csv"
    if long_path.exists():
        long = pd.read_csv(long_path)
        q_levels = list(dict.fromkeys(long["q"].tolist()))
        wide = prevalence_table(long, q_levels)
    t3_path = run_dir / "table3.csv"
    table3 = pd.read_csv(t3_path) if t3_path.exists() else None
    return wide, table3
