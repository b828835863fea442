"""
Metadata:
    Project: ThinPrice
    File Name: runner.py
    File Path: thinprice/pipeline/runner.py
    Module: Pipeline Orchestration
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Runs the stages of a study against one RunConfig: load or synthesize
    the survey, screen items, compute prevalence probabilities, run the
    repeated KS procedure per item, and write the run manifest.

    Item failures are isolated: the failing item is recorded in
    failures.json with its stage and error, the other items continue, and
    the run ends with the exit code of the most severe failure.

Contents:
    Classes:
        - ItemFailure: One failed item stage
        - RunOutcome: Exit code, artifacts and per-item status
        - Pipeline: Stage runner bound to a RunConfig

    Functions:
        - run_pipeline: Full run (load -> screen -> prevalence -> analyze)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
import scipy

import thinprice
from thinprice.config import ALL_SURVIVING, RunConfig
from thinprice.core.prevalence import PrevalenceResult, estimate_fsu_probs, prevalence_report
from thinprice.core.sampling import (
    RepetitionPlan,
    draw_thin_sample,
    repetition_seeds,
    write_selection_audit,
)
from thinprice.core.testing import RepeatedTestResult, repeated_ks_procedure
from thinprice.errors import EXIT_DATA, EXIT_OK, ThinPriceError, UnknownItemError
from thinprice.pipeline import reports
from thinprice.survey.dataset import SurveyDataset, load_csv, write_csv
from thinprice.survey.screening import ScreeningReport, screen_items
from thinprice.survey.synth import generate, load_synthetic_spec
from thinprice.utils.io import atomic_write_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ItemFailure:
    item: Optional[int]
    stage: str
    error: str
    message: str
    exit_code: int

    @classmethod
    def from_error(cls, item: Optional[int], stage: str, exc: Exception) -> ItemFailure:
        return cls(
            item=item,
            stage=stage,
            error=type(exc).__name__,
            message=str(exc),
            exit_code=getattr(exc, "exit_code", EXIT_DATA),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "item": self.item,
            "stage": self.stage,
            "error": self.error,
            "message": self.message,
            "exit_code": self.exit_code,
        }


@dataclass
class RunOutcome:
    output_dir: Path
    artifacts: list[Path] = field(default_factory=list)
    item_status: dict[int, str] = field(default_factory=dict)
    failures: list[ItemFailure] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return max((f.exit_code for f in self.failures), default=EXIT_OK)


class Pipeline:
    """
    Stage runner for one configuration.

    Each public stage writes its artifacts under cfg.output_dir and
    returns them; results of earlier stages (dataset, screening) are
    computed once and reused.

    Args:
        cfg (RunConfig): Validated configuration
    """

    def __init__(self, cfg: RunConfig) -> None:
        self.cfg = cfg
        self.out_dir = Path(cfg.output_dir)
        self.outcome = RunOutcome(output_dir=self.out_dir)
        self._dataset: Optional[SurveyDataset] = None
        self._screening: Optional[ScreeningReport] = None
        self.prevalence: dict[int, list[PrevalenceResult]] = {}
        self.results: dict[int, RepeatedTestResult] = {}

    # ----- inputs -----

    @property
    def dataset(self) -> SurveyDataset:
        if self._dataset is None:
            self._dataset = self._load()
        return self._dataset

    def _load(self) -> SurveyDataset:
        cfg = self.cfg
        if cfg.input_csv is not None:
            logger.info("Loading %s", cfg.input_csv)
            ds = load_csv(cfg.input_csv, cfg.schema)
        else:
            synth_cfg, truth = load_synthetic_spec(cfg.synthetic or {}, cfg.master_seed)
            logger.info("Generating synthetic survey with %d FSUs", synth_cfg.n_fsu)
            ds = generate(synth_cfg, truth, cfg.master_seed)
        logger.info("Loaded %r", ds)
        return ds

    def items(self) -> tuple[int, ...]:
        """Items to analyse: the explicit list, or every item passing screening."""
        if isinstance(self.cfg.items, str) and self.cfg.items == ALL_SURVIVING:
            return self.screening.included_items
        selected = tuple(self.cfg.items)
        for item in selected:
            verdict = self.screening.items.get(item)
            if verdict is not None and not verdict.included:
                logger.warning(
                    "Item %d was excluded by screening (%s) but is analysed on request",
                    item,
                    verdict.reason.value if verdict.reason else "?",
                )
        return selected

    def record(self, item: Optional[int], stage: str, exc: Exception) -> None:
        logger.error("Item %s failed during %s: %s", item if item is not None else "-", stage, exc)
        self.outcome.failures.append(ItemFailure.from_error(item, stage, exc))
        if item is not None:
            self.outcome.item_status[item] = "failed"

    # ----- stages -----

    @property
    def screening(self) -> ScreeningReport:
        if self._screening is None:
            self._screening = screen_items(self.dataset, self.cfg.screening)
        return self._screening

    def screen(self) -> list[Path]:
        paths = reports.write_screening(self.out_dir, self.screening)
        self.outcome.artifacts.extend(paths)
        return paths

    def run_prevalence(self) -> list[Path]:
        for item in self.items():
            try:
                inp = estimate_fsu_probs(self.dataset, item)
                self.prevalence[item] = prevalence_report(
                    inp, self.cfg.q_levels, self.cfg.exact_pmf_cap, self.cfg.continuity_correction
                )
            except ThinPriceError as exc:
                self.record(item, "prevalence", exc)
        paths = reports.write_prevalence(self.out_dir, self.prevalence, self.cfg.q_levels)
        self.outcome.artifacts.extend(paths)
        return paths

    def analyze(self) -> list[Path]:
        cfg = self.cfg
        plan = RepetitionPlan(cfg.master_seed, cfg.repetitions, cfg.salt)
        paths: list[Path] = []
        for item in self.items():
            if self.outcome.item_status.get(item) == "failed":
                continue
            try:
                if not self.dataset.has_item(item):
                    raise UnknownItemError(item)
                result = repeated_ks_procedure(
                    self.dataset,
                    item,
                    plan,
                    cfg.alpha,
                    cfg.meta_alpha,
                    threads=cfg.threads,
                    condition_cap=cfg.condition_cap,
                )
            except ThinPriceError as exc:
                self.record(item, "analyze", exc)
                continue
            self.results[item] = result
            self.outcome.item_status[item] = result.decision.value
            paths.extend(reports.write_repeated(self.out_dir, result))
            if cfg.audit_selections:
                paths.extend(self._audit(item, plan))
        paths.append(reports.write_table3(self.out_dir, self.results.values()))
        self.outcome.artifacts.extend(paths)
        return paths

    def _audit(self, item: int, plan: RepetitionPlan) -> list[Path]:
        target = reports.item_dir(self.out_dir, item) / "selections"
        width = len(str(plan.repetitions))
        paths: list[Path] = []
        for r, seed in enumerate(repetition_seeds(plan)):
            assignment = draw_thin_sample(self.dataset, item, int(seed))
            paths.append(
                write_selection_audit(target / f"rep_{r + 1:0{width}d}.csv", assignment)
            )
        return paths

    def synth(self, path: Optional[Path] = None) -> list[Path]:
        """Write the synthetic survey as CSV together with its ground truth."""
        synth_cfg, truth = load_synthetic_spec(self.cfg.synthetic or {}, self.cfg.master_seed)
        ds = generate(synth_cfg, truth, self.cfg.master_seed)
        self._dataset = ds
        csv_path = path or self.out_dir / "synthetic.csv"
        paths = [
            write_csv(ds, csv_path, self.cfg.schema),
            atomic_write_json(
                csv_path.with_name(csv_path.stem + "_truth.json"),
                {
                    "seed": self.cfg.master_seed,
                    "synth": synth_cfg.to_dict(),
                    "truth": truth.to_dict(),
                },
            ),
        ]
        self.outcome.artifacts.extend(paths)
        return paths

    # ----- bookkeeping -----

    def write_manifest(self, stages: list[str]) -> Path:
        """Manifest with config echo, versions and item status; no timestamps."""
        failures_path = self.out_dir / "failures.json"
        if self.outcome.failures:
            atomic_write_json(failures_path, [f.to_dict() for f in self.outcome.failures])
        elif failures_path.exists():
            failures_path.unlink()
        outputs = sorted(
            {
                str(p.relative_to(self.out_dir))
                for p in self.outcome.artifacts
                if p.is_relative_to(self.out_dir)
            }
        )
        manifest = {
            "package": {"name": "thinprice", "version": thinprice.__version__},
            "versions": {
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
            },
            "config": self.cfg.to_dict(),
            "master_seed": self.cfg.master_seed,
            "stages": stages,
            "items": {
                str(item): status for item, status in sorted(self.outcome.item_status.items())
            },
            "outputs": outputs,
            "exit_code": self.outcome.exit_code,
        }
        return atomic_write_json(self.out_dir / "manifest.json", manifest)


def run_pipeline(cfg: RunConfig) -> RunOutcome:
    """
    Run every stage and write the manifest.

    Args:
        cfg (RunConfig): Validated configuration

    Returns:
        RunOutcome: exit_code 0 on success, otherwise the code of the most
        severe failure; artifacts of completed items are kept

    Examples:
        >>> outcome = run_pipeline(load_config("run.json"))   # doctest: +SKIP
        >>> outcome.exit_code                                  # doctest: +SKIP
        0

    Version: 0.1.0
    """
    pipeline = Pipeline(cfg)
    steps = (
        ("load", lambda: pipeline.dataset),
        ("screen", pipeline.screen),
        ("prevalence", pipeline.run_prevalence),
        ("analyze", pipeline.analyze),
    )
    completed: list[str] = []
    for stage, step in steps:
        try:
            step()
        except (ThinPriceError, OSError) as exc:
            pipeline.record(None, stage, exc)
            break
        completed.append(stage)
    pipeline.write_manifest(completed)
    outcome = pipeline.outcome
    if outcome.failures:
        logger.warning(
            "Run finished with %d failure(s); see %s",
            len(outcome.failures),
            outcome.output_dir / "failures.json",
        )
    return outcome
