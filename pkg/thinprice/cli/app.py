"""
Metadata:
    Project: ThinPrice
    File Name: app.py
    File Path: thinprice/cli/app.py
    Module: CLI Application
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Typer CLI for ThinPrice. Every stage of a study can be run on its own
    or composed with `run`; all stages read the same JSON config file.

Usage:
    $ thinprice run --config study.json
    $ thinprice analyze --config study.json --items 101,172 --threads 0
    $ thinprice synth --config study.json --output data/
    $ thinprice report --config study.json
    $ THINPRICE_LOG=INFO thinprice run --config study.json

Contents:
    Commands:
        - screen: Price-ratio screening of every item
        - prevalence: Prevalence probabilities per item and q
        - analyze: Repeated KS procedure per item
        - run: screen + prevalence + analyze + manifest
        - synth: Write a synthetic survey CSV and its ground truth
        - report: Re-render the tables of an existing run
        - info: Package information
        - version: Display version

    Exports:
        - app: Typer application instance
        - main: Main entry point

Exit Codes:
    0 success, 1 configuration error, 2 data error, 3 numerical failure

Entry Point:
    Defined in pyproject.toml:
    [project.scripts]
    thinprice = "thinprice.cli.app:main"
"""

from pathlib import Path
from typing import Callable, Optional

import typer
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

import thinprice
from thinprice.config import RunConfig, load_config, parse_items
from thinprice.errors import EXIT_DATA, ThinPriceError
from thinprice.pipeline import reports
from thinprice.pipeline.runner import Pipeline, RunOutcome, run_pipeline
from thinprice.utils.logs import configure_logging

app = typer.Typer(
    name="thinprice",
    help="ThinPrice - one price per FSU, tested against the full survey",
    add_completion=False,
)

console = Console()

ConfigOption = typer.Option(..., "--config", "-c", help="JSON run configuration")
ItemsOption = typer.Option(None, "--items", help="Comma-separated item codes (overrides config)")
SeedOption = typer.Option(None, "--seed", help="Master seed (overrides config)")
OutputOption = typer.Option(None, "--output", "-o", help="Output directory (overrides config)")
ThreadsOption = typer.Option(None, "--threads", help="Worker threads, 0 = auto (overrides config)")


@app.callback()
def _setup() -> None:
    configure_logging()


def _config(
    config: Path,
    items: Optional[str],
    seed: Optional[int],
    output: Optional[Path],
    threads: Optional[int],
) -> RunConfig:
    return load_config(
        config,
        items=parse_items(items) if items is not None else None,
        master_seed=seed,
        output_dir=str(output) if output is not None else None,
        threads=threads,
    )


def _guarded(action: Callable[[], int]) -> None:
    """Run action, translating ThinPriceError into its exit code."""
    try:
        code = action()
    except ThinPriceError as exc:
        console.print(f"\n[red]Error ({type(exc).__name__}): {escape(str(exc))}[/red]")
        raise typer.Exit(code=exc.exit_code) from None
    except OSError as exc:
        console.print(f"\n[red]I/O error: {escape(str(exc))}[/red]")
        raise typer.Exit(code=EXIT_DATA) from None
    if code:
        raise typer.Exit(code=code)


def _finish(pipeline: Pipeline, stages: list[str]) -> int:
    pipeline.write_manifest(stages)
    return _summarize(pipeline.outcome)


def _summarize(outcome: RunOutcome) -> int:
    if outcome.item_status:
        table = Table(title="Items", border_style="green")
        table.add_column("Item", style="cyan")
        table.add_column("Status")
        for item, status in sorted(outcome.item_status.items()):
            colour = {"accept": "green", "reject": "red"}.get(status, "yellow")
            table.add_row(str(item), f"[{colour}]{status}[/{colour}]")
        console.print(table)
    for failure in outcome.failures:
        where = f"item {failure.item}" if failure.item is not None else "run"
        console.print(
            f"[yellow]![/yellow] {where} failed in {failure.stage}: {escape(failure.message)}"
        )
    console.print(f"[green]✓[/green] Outputs in [bold cyan]{outcome.output_dir}[/bold cyan]")
    return outcome.exit_code


@app.command()
def screen(
    config: Path = ConfigOption,
    items: Optional[str] = ItemsOption,
    seed: Optional[int] = SeedOption,
    output: Optional[Path] = OutputOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """
    Screen items by within-FSU price ratios.

    Writes screening.json and screening_histograms.csv.

    Examples:
        $ thinprice screen --config study.json
    """

    def action() -> int:
        pipeline = Pipeline(_config(config, items, seed, output, threads))
        pipeline.screen()
        report = pipeline.screening
        table = Table(title="Screening", border_style="green")
        table.add_column("Item", style="cyan")
        table.add_column("FSU ratios", justify="right")
        table.add_column("Mass below t", justify="right")
        table.add_column("Verdict")
        for item, res in report.items.items():
            if res.included:
                verdict = "[green]include[/green]"
            else:
                verdict = f"[red]{res.reason.value if res.reason else 'exclude'}[/red]"
            table.add_row(str(item), str(res.n_ratios), f"{res.mass_below:.3f}", verdict)
        console.print(table)
        return _finish(pipeline, ["load", "screen"])

    _guarded(action)


@app.command()
def prevalence(
    config: Path = ConfigOption,
    items: Optional[str] = ItemsOption,
    seed: Optional[int] = SeedOption,
    output: Optional[Path] = OutputOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """
    Compute prevalence probabilities P(X >= Nq) for every selected item.

    Writes prevalence.csv (long) and prevalence_table.csv (item x q).

    Examples:
        $ thinprice prevalence --config study.json --items 101
    """

    def action() -> int:
        cfg = _config(config, items, seed, output, threads)
        pipeline = Pipeline(cfg)
        pipeline.run_prevalence()
        long = reports.prevalence_frame(pipeline.prevalence)
        console.print(reports.render_prevalence(reports.prevalence_table(long, cfg.q_levels)))
        return _finish(pipeline, ["load", "screen", "prevalence"])

    _guarded(action)


@app.command()
def analyze(
    config: Path = ConfigOption,
    items: Optional[str] = ItemsOption,
    seed: Optional[int] = SeedOption,
    output: Optional[Path] = OutputOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """
    Run the repeated KS procedure for every selected item.

    Writes items/<item>/repeated_test.json, items/<item>/p_values.csv and
    table3.csv.

    Examples:
        $ thinprice analyze --config study.json --threads 0
    """

    def action() -> int:
        pipeline = Pipeline(_config(config, items, seed, output, threads))
        pipeline.analyze()
        console.print(reports.render_table3(reports.table3_frame(pipeline.results.values())))
        return _finish(pipeline, ["load", "screen", "analyze"])

    _guarded(action)


@app.command()
def run(
    config: Path = ConfigOption,
    items: Optional[str] = ItemsOption,
    seed: Optional[int] = SeedOption,
    output: Optional[Path] = OutputOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """
    Run every stage and write the run manifest.

    Identical config and seed give a byte-identical output directory.

    Examples:
        $ thinprice run --config study.json --seed 20111
    """

    def action() -> int:
        cfg = _config(config, items, seed, output, threads)
        console.print()
        console.print(Panel.fit(
            "[bold green]ThinPrice run[/bold green]\n"
            f"[cyan]seed {cfg.master_seed}, {cfg.repetitions} repetitions"
            f" -> {escape(cfg.output_dir)}[/cyan]",
            border_style="green",
        ))
        return _summarize(run_pipeline(cfg))

    _guarded(action)


@app.command()
def synth(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    output: Optional[Path] = OutputOption,
    csv: Optional[Path] = typer.Option(
        None, "--csv", help="CSV path (default <output>/synthetic.csv)"
    ),
) -> None:
    """
    Write a synthetic survey in the configured CSV schema.

    The ground truth (coefficients and per-FSU probabilities) is written
    next to it as <name>_truth.json.

    Examples:
        $ thinprice synth --config study.json --seed 7 --csv data/survey.csv
    """

    def action() -> int:
        pipeline = Pipeline(_config(config, None, seed, output, None))
        paths = pipeline.synth(csv)
        for path in paths:
            console.print(f"[green]✓[/green] Wrote [bold cyan]{path}[/bold cyan]")
        return 0

    _guarded(action)


@app.command()
def report(
    config: Path = ConfigOption,
    output: Optional[Path] = OutputOption,
    as_csv: bool = typer.Option(False, "--csv", help="Print CSV instead of tables"),
) -> None:
    """
    Re-render the prevalence and repeated-test tables of an existing run.

    Examples:
        $ thinprice report --config study.json
        $ thinprice report --config study.json --csv > tables.csv
    """

    def action() -> int:
        cfg = _config(config, None, None, output, None)
        wide, table3 = reports.read_run_tables(Path(cfg.output_dir))
        if wide is None and table3 is None:
            console.print(f"[yellow]No run tables found in {cfg.output_dir}[/yellow]")
            return EXIT_DATA
        for frame, render in ((wide, reports.render_prevalence), (table3, reports.render_table3)):
            if frame is None:
                continue
            if as_csv:
                typer.echo(frame.to_csv(index=False, lineterminator="\n"), nl=False)
            else:
                console.print(render(frame))
        return 0

    _guarded(action)


@app.command()
def info() -> None:
    """
    Display package information.

    Examples:
        $ thinprice info

    Version: 0.1.0
    """
    table = Table(title="ThinPrice Package Information", border_style="green")

    table.add_column("Property", style="cyan", no_wrap=True)
    table.add_column("Value", style="white")

    table.add_row("Package", "thinprice")
    table.add_row("Version", thinprice.__version__)
    table.add_row("Description", thinprice.__description__)
    table.add_row("Author", thinprice.__author__)
    table.add_row("License", thinprice.__license__)

    console.print()
    console.print(table)
    console.print()

    console.print("[bold green]Stages:[/bold green]")
    console.print("  • [cyan]screen[/cyan]      - Within-FSU price-ratio screening")
    console.print("  • [cyan]prevalence[/cyan]  - Poisson-Binomial prevalence probabilities")
    console.print("  • [cyan]analyze[/cyan]     - Repeated KS test of thin price sampling")
    console.print("  • [cyan]synth[/cyan]       - Synthetic survey with known ground truth")
    console.print()


@app.command()
def version() -> None:
    """
    Display version information.

    Examples:
        $ thinprice version

    Version: 0.1.0
    """
    console.print(
        f"\n[bold green]ThinPrice[/bold green] version [cyan]{thinprice.__version__}[/cyan]\n"
    )


def main() -> None:
    """
    Main CLI entry point.

    Called when running `thinprice` command.

    Version: 0.1.0
    """
    app()


if __name__ == "__main__":
    main()
