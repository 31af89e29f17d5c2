"""Test CLI."""

from __future__ import annotations

import json
from typing import Any
from typing import TYPE_CHECKING

from click.testing import CliRunner

from meanequi import _cli
from meanequi import run_experiment
from meanequi._cli import cli

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    import pytest

GRIDS = """
grids:
  eps: [0.5, 0.25]
  delta: [0.5, 0.25, 0.125, 0.0625]
  pairs_per_cell: 4
  horizon_numeric: 1000
  horizon_symbolic: 2048
"""


def test_catalog_list() -> None:
    runner = CliRunner()
    without_args = runner.invoke(cli)
    assert "catalog" in without_args.output

    listing = runner.invoke(cli, ("catalog", "list"))
    assert listing.exit_code == 0
    lines = listing.output.splitlines()
    assert len(lines) >= 9
    assert lines[0].startswith("rotation ")
    assert any("external literature" in line for line in lines)

    minimal = runner.invoke(cli, ("catalog", "list", "--flag", "minimal"))
    assert minimal.exit_code == 0
    assert set(minimal.output.splitlines()) < set(lines)

    unknown = runner.invoke(cli, ("catalog", "list", "--flag", "chaotic"))
    assert unknown.exit_code == 1
    assert "Unknown flag 'chaotic'" in unknown.output


def test_analyze_usage_errors(write_config: Callable[[str], Path]) -> None:
    runner = CliRunner()
    without_config = runner.invoke(cli, ("analyze",))
    assert without_config.exit_code == 1
    assert "No config file specified" in without_config.output

    malformed = write_config(
        """
        systems: [rotation]
        properties: [mean_eq]
        seed: 0
        grids:
          eps: [0.1, 0.5]
        """
    )
    result = runner.invoke(cli, ("analyze", "--config", str(malformed)))
    assert result.exit_code == 1
    assert "grids.eps" in result.output

    unknown_system = write_config(
        "systems: [baker]\nproperties: [mean_eq]\nseed: 0\n"
    )
    result = runner.invoke(cli, ("analyze", "--config", str(unknown_system)))
    assert result.exit_code == 1
    assert "systems" in result.output


def test_analyze(write_config: Callable[[str], Path], tmp_path: Path) -> None:
    runner = CliRunner()
    config = write_config(
        "systems: [rotation, full_shift]\n"
        "properties: [mean_eq, theorem_3_8]\n"
        "seed: 0\n" + GRIDS
    )
    out = tmp_path / "out"
    result = runner.invoke(
        cli, ("analyze", "--config", str(config), "--out", str(out))
    )
    assert result.exit_code == 0, result.output
    assert "rotation" in result.output
    assert "theorem_3_8: Consistent" in result.output

    report = json.loads((out / "report.json").read_text())
    assert report["contradictions"] == []

    listing = runner.invoke(
        cli, ("plotdata", "--report", str(out / "report.json"))
    )
    assert listing.exit_code == 0
    assert "full_shift/mean_eq/witness/besicovitch_limsup" in listing.output

    series = runner.invoke(
        cli,
        (
            "plotdata",
            "--report",
            str(out / "report.json"),
            "--series",
            "full_shift/mean_eq/witness/besicovitch_limsup",
        ),
    )
    assert series.exit_code == 0
    assert series.output.splitlines()[0] == "x,y"
    assert series.output.splitlines()[-1].startswith("2048,")

    missing = runner.invoke(
        cli,
        (
            "plotdata",
            "--report",
            str(out / "report.json"),
            "--series",
            "rotation/mean_eq/witness/besicovitch_limsup",
        ),
    )
    assert missing.exit_code == 1
    assert "unknown series" in missing.output


def test_plotdata_without_witness(
    write_config: Callable[[str], Path], tmp_path: Path
) -> None:
    runner = CliRunner()
    config = write_config(
        "systems: [rotation]\nproperties: [mean_eq]\nseed: 0\n" + GRIDS
    )
    out = tmp_path / "out"
    result = runner.invoke(
        cli, ("analyze", "--config", str(config), "--out", str(out))
    )
    assert result.exit_code == 0

    missing = runner.invoke(
        cli,
        (
            "plotdata",
            "--report",
            str(out / "report.json"),
            "--series",
            "rotation/mean_eq/witness/besicovitch_limsup",
        ),
    )
    assert missing.exit_code == 1
    assert "no witness series" in missing.output


def test_contradictions_exit_with_two(
    write_config: Callable[[str], Path],
    tmp_path: Path,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    def contradicting(config: Any) -> dict[str, Any]:
        report = run_experiment(config)
        report["contradictions"] = ["theorem_3_8:rotation"]
        return report

    monkeypatch.setattr(_cli, "run_experiment", contradicting)

    config = write_config(
        "systems: [rotation]\nproperties: [mean_eq]\nseed: 0\n" + GRIDS
    )
    result = CliRunner().invoke(
        cli,
        ("analyze", "--config", str(config), "--out", str(tmp_path / "out")),
    )
    assert result.exit_code == 2
    assert "contradiction: theorem_3_8:rotation" in result.output


def test_missing_files_are_usage_errors(tmp_path: Path) -> None:
    runner = CliRunner()
    missing = tmp_path / "nope.yaml"
    result = runner.invoke(cli, ("analyze", "--config", str(missing)))
    assert result.exit_code == 1
    assert "Invalid config" in result.output

    result = runner.invoke(
        cli, ("plotdata", "--report", str(tmp_path / "report.json"))
    )
    assert result.exit_code == 1
    assert "Unreadable report" in result.output

    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    result = runner.invoke(cli, ("plotdata", "--report", str(broken)))
    assert result.exit_code == 1
