"""Test experiment runs and reports."""

from __future__ import annotations

import json
from typing import Any
from typing import TYPE_CHECKING

import jsonschema
import numpy as np
import pytest
from click.testing import CliRunner
from scripts import cli as scripts_cli

from meanequi import SeriesError
from meanequi import parse_config
from meanequi import point_from_json
from meanequi import run_experiment
from meanequi import validate_report
from meanequi import write_report
from meanequi._report import RUN_KEY
from meanequi._report import dumps
from meanequi._report import load_report
from meanequi._report import report_series
from meanequi._report import select_series

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from meanequi import CatalogEntry
    from meanequi import ExperimentConfig

SMALL_GRIDS = {
    "eps": [0.5, 0.25],
    "delta": [2.0**-k for k in range(1, 9)],
    "pairs_per_cell": 8,
    "horizon_numeric": 2000,
    "horizon_symbolic": 4096,
    "search_budget": 256,
}


def _config(systems: list[str], properties: list[str]) -> ExperimentConfig:
    return parse_config(
        {
            "systems": systems,
            "properties": properties,
            "seed": 7,
            "grids": SMALL_GRIDS,
        }
    )


@pytest.fixture(scope="module")
def config() -> ExperimentConfig:
    return _config(
        ["rotation", "full_shift"],
        ["mean_eq", "eq_in_mean", "theorem_3_8", "lemma_6_4"],
    )


@pytest.fixture(scope="module")
def report(config: ExperimentConfig) -> dict[str, Any]:
    return run_experiment(config)


def test_run_experiment(report: dict[str, Any]) -> None:
    validate_report(report)
    assert report["contradictions"] == []
    assert list(report["systems"]) == ["rotation", "full_shift"]
    assert report["config"]["seed"] == 7

    rotation = report["systems"]["rotation"]
    assert rotation["verdicts"]["mean_eq"]["outcome"] == "CertifiedAtScale"
    checks = {c["check"]: c["status"] for c in rotation["checks"]}
    assert checks == {"theorem_3_8": "Consistent", "lemma_6_4": "Consistent"}
    assert all(
        verdict["relation"] == "Q_me" for verdict in rotation["pair_verdicts"]
    )

    full_shift = report["systems"]["full_shift"]
    assert full_shift["verdicts"]["mean_eq"]["outcome"] == "Refuted"
    assert full_shift["entry"]["expected"]["mean_eq"] == "False"


def test_reports_are_reproducible(
    config: ExperimentConfig, report: dict[str, Any]
) -> None:
    again = run_experiment(config)
    first = {k: v for k, v in report.items() if k != RUN_KEY}
    second = {k: v for k, v in again.items() if k != RUN_KEY}
    assert dumps(first) == dumps(second)


def test_write_report(report: dict[str, Any], tmp_path: Path) -> None:
    written = write_report(report, tmp_path / "out", "both")
    assert written[0] == tmp_path / "out" / "report.json"
    assert load_report(written[0]) == json.loads(dumps(report))

    names = {path.name for path in written[1:]}
    assert "full_shift__mean_eq__witness__besicovitch_limsup.csv" in names
    modulus = tmp_path / "out" / "series" / "rotation__mean_eq__modulus.csv"
    assert modulus.read_text().splitlines()[0] == "x,y"

    only_json = write_report(report, tmp_path / "json", "json")
    assert [path.name for path in only_json] == ["report.json"]


def test_invalid_reports_are_rejected(
    report: dict[str, Any], tmp_path: Path
) -> None:
    broken = {k: v for k, v in report.items() if k != "contradictions"}
    with pytest.raises(jsonschema.ValidationError):
        validate_report(broken)
    with pytest.raises(jsonschema.ValidationError):
        write_report(broken, tmp_path)
    assert not (tmp_path / "report.json").exists()


def test_series(report: dict[str, Any]) -> None:
    series = report_series(report)
    witness = select_series(
        report, "full_shift/mean_eq/witness/besicovitch_limsup"
    )
    assert witness == series["full_shift/mean_eq/witness/besicovitch_limsup"]
    assert witness[-1][0] == 4096
    modulus = select_series(report, "rotation/mean_eq/modulus")
    assert modulus[0] == [0.5, 0.5]
    assert all(delta <= eps for eps, delta in modulus)

    with pytest.raises(SeriesError, match="unknown series"):
        select_series(report, "rotation/weyl_mean_eq/modulus")


def test_missing_witness_series() -> None:
    report = run_experiment(_config(["rotation"], ["mean_eq"]))
    with pytest.raises(SeriesError, match="no witness series"):
        select_series(report, "rotation/mean_eq/witness/besicovitch_limsup")


def test_verify_witnesses(report: dict[str, Any], tmp_path: Path) -> None:
    (path, *_) = write_report(report, tmp_path, "json")
    result = CliRunner().invoke(scripts_cli, ("verify-witnesses", str(path)))
    assert result.exit_code == 0, result.output
    assert "OK: full_shift/mean_eq eps=0.5" in result.output
    assert "MISMATCH" not in result.output

    tampered = json.loads(path.read_text())
    cells = tampered["systems"]["full_shift"]["verdicts"]["mean_eq"]["scan"]
    cells["per_eps"][0]["refutation"]["estimate"]["value"] += 0.5
    path.write_text(dumps(tampered))
    result = CliRunner().invoke(scripts_cli, ("verify-witnesses", str(path)))
    assert result.exit_code == 1
    assert "MISMATCH: full_shift/mean_eq eps=0.5" in result.output


@pytest.mark.parametrize(
    "system_id",
    [
        "rotation",
        "sturmian",
        "squaring",
        "rotation_x_rotation",
        "rotation_x_squaring",
        "finite_permutation",
        "finite_contraction",
    ],
)
def test_no_off_diagonal_mean_sensitive_pairs(system_id: str) -> None:
    report = run_experiment(_config([system_id], ["mean_eq", "lemma_6_4"]))
    section = report["systems"][system_id]
    (check,) = section["checks"]
    assert check["check"] == "lemma_6_4"
    assert check["status"] != "Contradiction"
    assert check["details"]["off_diagonal_holds"] == 0
    assert report["contradictions"] == []


def test_verify_pair_witnesses(
    tmp_path: Path, entry: Callable[[str], CatalogEntry]
) -> None:
    report = run_experiment(
        _config(["full_shift"], ["mean_eq", "relation_collapse"])
    )
    (path, *_) = write_report(report, tmp_path, "json")
    result = CliRunner().invoke(scripts_cli, ("verify-witnesses", str(path)))
    assert result.exit_code == 0, result.output
    assert "OK: full_shift/P Holds" in result.output
    assert "OK: full_shift/BP" in result.output
    original = path.read_text()

    tampered = json.loads(original)
    verdicts = tampered["systems"]["full_shift"]["pair_verdicts"]
    proximal = next(
        v for v in verdicts if v["relation"] == "P" and v["outcome"] == "Holds"
    )
    x, y = (point_from_json(point) for point in proximal["pair"])
    horizon = proximal["parameters"]["horizon"]
    trace = entry("full_shift").system.distance_trace(x, y, horizon + 1)
    far = int(np.flatnonzero(trace[1:] >= 0.25)[0]) + 1
    proximal["witness"]["times"]["0.25"] = far
    path.write_text(dumps(tampered))
    result = CliRunner().invoke(scripts_cli, ("verify-witnesses", str(path)))
    assert result.exit_code == 1
    assert "MISMATCH: full_shift/P Holds eps=0.25" in result.output

    tampered = json.loads(original)
    verdicts = tampered["systems"]["full_shift"]["pair_verdicts"]
    banach = next(v for v in verdicts if v["relation"] == "BP")
    banach["witness"]["upper_banach"]["0.5"] += 0.5
    path.write_text(dumps(tampered))
    result = CliRunner().invoke(scripts_cli, ("verify-witnesses", str(path)))
    assert result.exit_code == 1
    assert "MISMATCH: full_shift/BP" in result.output
