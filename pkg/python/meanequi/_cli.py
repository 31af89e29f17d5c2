"""The command-line interface for meanequi."""

from __future__ import annotations

import logging
import sys
from logging import getLogger
from pathlib import Path
from typing import Any

import click

from meanequi._catalog import ESTABLISHED
from meanequi._catalog import Flags
from meanequi._catalog import build_catalog
from meanequi._config import load_config
from meanequi._report import load_report
from meanequi._report import report_series
from meanequi._report import run_experiment
from meanequi._report import select_series
from meanequi._report import series_csv
from meanequi._report import write_report
from meanequi._types import ConfigError
from meanequi._types import SeriesError

logger = getLogger(__name__)

#: Exit code of ``analyze`` when a cross-check reports a contradiction.
CONTRADICTION_EXIT_CODE = 2

_OUTCOME_COLOURS = {
    "CertifiedAtScale": "green",
    "Refuted": "red",
    "Consistent": "green",
    "Contradiction": "red",
}


class MeqUsageError(click.UsageError):
    """Usage errors exit with 1, 2 is reserved for contradictions."""

    exit_code = 1


class NoConfigGivenError(MeqUsageError):
    def __init__(self: NoConfigGivenError) -> None:
        super().__init__("No config file specified")


class ConfigFileError(MeqUsageError):
    def __init__(self: ConfigFileError, error: ConfigError) -> None:
        super().__init__(f"Invalid config: {error}")


class UnknownFlagError(MeqUsageError):
    def __init__(self: UnknownFlagError, flag: str) -> None:
        known = ", ".join(Flags.names())
        super().__init__(f"Unknown flag {flag!r} (known: {known})")


class ReportFileError(MeqUsageError):
    def __init__(self: ReportFileError, error: Exception) -> None:
        super().__init__(f"Unreadable report: {error}")


class SeriesNotFoundError(click.ClickException):
    pass


@click.group()
def cli() -> None: ...


@cli.group()
def catalog() -> None:
    """Inspect the catalog of built-in systems."""


@catalog.command("list")
@click.option(
    "--flag",
    "flags",
    multiple=True,
    help="Only list entries with this flag (repeatable).",
)
def catalog_list(*, flags: tuple[str, ...]) -> None:
    """List the catalog entries with their flags and expectations."""
    for flag in flags:
        if flag not in Flags.names():
            raise UnknownFlagError(flag)
    entries = [
        entry
        for entry in build_catalog()
        if all(flag in entry.flags.enabled() for flag in flags)
    ]
    width = max((len(entry.id) for entry in entries), default=2)
    for entry in entries:
        expected = " ".join(
            f"{prop.value}={value.value}"
            for prop, value in sorted(entry.expected.items())
        )
        enabled = ",".join(entry.flags.enabled()) or "-"
        source = (
            ""
            if entry.expectation_source == ESTABLISHED
            else f" ({entry.expectation_source})"
        )
        click.echo(f"{entry.id:<{width}}  [{enabled}]  {expected}{source}")


FILENAME_TYPE = click.Path(dir_okay=False, resolve_path=True)


def _style(text: str) -> str:
    colour = _OUTCOME_COLOURS.get(text)
    return click.style(text, fg=colour) if colour else text


def _echo_summary(report: dict[str, Any]) -> None:
    for system, section in report["systems"].items():
        click.echo(click.style(system, bold=True))
        for prop, verdict in section["verdicts"].items():
            scan = verdict["scan"]
            click.echo(
                f"  {prop}: {_style(verdict['outcome'])} "
                f"(horizon {scan['horizon']}, "
                f"{scan['pair_budget']} pairs per delta)"
            )
            for cell in scan["per_eps"]:
                if cell["found_delta"] is not None:
                    result = f"delta = {cell['found_delta']:.6g}"
                elif cell["refutation"] is not None:
                    value = cell["refutation"]["estimate"]["value"]
                    result = click.style(
                        f"refuted, estimate {value:.6g}", fg="red"
                    )
                else:
                    result = "no delta found"
                click.echo(f"    eps = {cell['eps']:<10.6g} {result}")
        for check in section["checks"]:
            click.echo(f"  {check['check']}: {_style(check['status'])}")
        ue = section.get("unique_ergodicity")
        if ue:
            click.echo(f"  unique_ergodicity: {ue['outcome']}")


@cli.command()
@click.option(
    "--config", "config_file", type=FILENAME_TYPE, help="The YAML config."
)
@click.option(
    "--out",
    type=click.Path(file_okay=False),
    help="Output directory, overrides output_dir of the config.",
)
@click.option("-v", "--verbose", is_flag=True, help="Verbose output.")
def analyze(
    *, config_file: str | None, out: str | None, verbose: bool
) -> None:
    """Run the checkers described by a config file and write a report."""
    if not config_file:
        raise NoConfigGivenError

    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)

    try:
        config = load_config(config_file, Path(out) if out else None)
        report = run_experiment(config)
    except ConfigError as error:
        raise ConfigFileError(error) from error
    written = write_report(report, config.output_dir, config.format)
    _echo_summary(report)
    for path in written:
        logger.info("wrote %s", path)

    if report["contradictions"]:
        for item in report["contradictions"]:
            msg = click.style(f"contradiction: {item}", fg="red")
            click.echo(msg, err=True)
        sys.exit(CONTRADICTION_EXIT_CODE)


@cli.command()
@click.option("--report", "report_file", type=FILENAME_TYPE, required=True)
@click.option("--series", "selector", default="", help="Series selector.")
def plotdata(*, report_file: str, selector: str) -> None:
    """Print a report series as CSV, or list the series if none is given."""
    try:
        report = load_report(report_file)
    except (OSError, ValueError) as error:
        raise ReportFileError(error) from error
    if not selector:
        for key in sorted(report_series(report)):
            click.echo(key)
        return
    try:
        points = select_series(report, selector)
    except SeriesError as error:
        raise SeriesNotFoundError(str(error)) from error
    click.echo(series_csv(points), nl=False)
