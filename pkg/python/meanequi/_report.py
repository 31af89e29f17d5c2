"""Running experiments and writing, validating and reading reports."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from datetime import timezone
from functools import cache
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version
from logging import getLogger
from pathlib import Path
from typing import Any
from typing import TYPE_CHECKING

import jsonschema

from meanequi._catalog import build_catalog
from meanequi._catalog import find_entry
from meanequi._catalog import sample_points
from meanequi._checkers import CheckStatus
from meanequi._checkers import ConsistencyReport
from meanequi._checkers import ScanCache
from meanequi._checkers import averaged_function_equicontinuity
from meanequi._checkers import check_mean_l_stability
from meanequi._checkers import check_product_closure
from meanequi._checkers import check_relation_collapse
from meanequi._checkers import check_theorem_3_6
from meanequi._checkers import check_theorem_3_8
from meanequi._checkers import check_theorem_5_1
from meanequi._checkers import check_theorem_5_3
from meanequi._checkers import check_weakly_mixing_fixed_point
from meanequi._ergodic import unique_ergodicity_check
from meanequi._proximality import mean_sensitive_pair_test
from meanequi._spaces import ProductSystem
from meanequi._types import CapabilityError
from meanequi._types import Outcome
from meanequi._types import PreconditionError
from meanequi._types import Property
from meanequi._types import SeriesError
from meanequi._util import geometric_schedule
from meanequi._util import log_timing
from meanequi._util import worker_count

if TYPE_CHECKING:
    from collections.abc import Callable
    from collections.abc import Sequence

    from meanequi._catalog import CatalogEntry
    from meanequi._config import ExperimentConfig
    from meanequi._proximality import PairVerdict

logger = getLogger(__name__)

SCHEMA_PATH = Path(__file__).parent / "schema" / "report.schema.json"

#: Report key holding everything that differs between identical runs.
RUN_KEY = "run"

#: Q_me tests run on this many sampled pairs per system.
MEAN_SENSITIVE_PAIRS = 2

#: Horizon cap for the diagnostics that do not scan moduli.
DIAGNOSTIC_HORIZON = 100_000


def tool_version() -> str:
    try:
        return version("meanequi")
    except PackageNotFoundError:
        return "0.0.0"


@cache
def load_schema() -> dict[str, Any]:
    """The shipped report schema."""
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))  # type: ignore[no-any-return]


def validate_report(report: dict[str, Any]) -> None:
    """Raise ``jsonschema.ValidationError`` if the report is malformed."""
    jsonschema.validate(instance=report, schema=load_schema())


def _skipped(check: str, system: str, reason: str) -> ConsistencyReport:
    return ConsistencyReport(
        check, system, CheckStatus.SKIPPED, {"reason": reason}
    )


def _lemma_6_4(
    entry: CatalogEntry, config: ExperimentConfig, cache: ScanCache
) -> tuple[ConsistencyReport, list[PairVerdict]]:
    """Off-diagonal Q_me searches must fail on mean equicontinuous systems."""
    sys = entry.system
    points = sample_points(entry, MEAN_SENSITIVE_PAIRS + 1, config.rng_seed)
    pairs = list(zip(points, points[1:], strict=False))
    # tau stays below d(x, y) / 4 for every pair
    taus = [min(sys.diameter_bound, sys.metric(x, y)) / 8 for x, y in pairs]
    verdicts = [
        mean_sensitive_pair_test(
            sys,
            x,
            y,
            tau,
            0.25,
            config.check.eps_schedule,
            config.check.search_budget,
            config.rng_seed,
            entry.certificates,
        )
        for (x, y), tau in zip(pairs, taus, strict=True)
        if tau > 0
    ]
    holding = sum(
        1
        for verdict in verdicts
        if verdict.holds and verdict.witness.get("construction") != "diagonal"
    )
    mean_eq = cache.verdict(entry, Property.MEAN_EQ).outcome
    if mean_eq is Outcome.CERTIFIED:
        status = (
            CheckStatus.CONTRADICTION if holding else CheckStatus.CONSISTENT
        )
    elif mean_eq is Outcome.REFUTED and holding:
        status = CheckStatus.CONSISTENT
    else:
        status = CheckStatus.INCONCLUSIVE
    report = ConsistencyReport(
        "lemma_6_4",
        sys.id,
        status,
        {
            "mean_eq": mean_eq.value,
            "off_diagonal_holds": holding,
            "taus": taus,
        },
    )
    return report, verdicts


def _run_check(
    name: str,
    entry: CatalogEntry,
    entries: Sequence[CatalogEntry],
    config: ExperimentConfig,
    cache: ScanCache,
    pair_verdicts: list[PairVerdict],
) -> list[ConsistencyReport]:
    check = config.check
    sys = entry.system
    simple: dict[str, Callable[..., ConsistencyReport]] = {
        "theorem_3_6": check_theorem_3_6,
        "theorem_3_8": check_theorem_3_8,
        "theorem_5_1": check_theorem_5_1,
        "mean_l_stability": check_mean_l_stability,
        "weakly_mixing_fixed_point": check_weakly_mixing_fixed_point,
    }
    if name in simple:
        return [simple[name](entry, check, cache)]
    if name == "theorem_5_3":
        try:
            return [check_theorem_5_3(entry, check, cache)]
        except PreconditionError as error:
            return [_skipped(name, sys.id, str(error))]
    if name == "product_closure":
        if len(entry.factors) != 2 or not isinstance(sys, ProductSystem):
            return [_skipped(name, sys.id, "not a catalog product")]
        known = {e.id: e for e in entries}
        left, right = (
            known.get(factor_id, factor)
            for factor_id, factor in zip(
                entry.factors, sys.factors, strict=True
            )
        )
        return [check_product_closure(left, right, entry, check, cache)]
    if name == "averaged_function_equicontinuity":
        observables = sys.observables()
        if not observables:
            return [_skipped(name, sys.id, "no registered functions")]
        horizon = min(check.horizon_for(sys), DIAGNOSTIC_HORIZON // 10)
        eps = check.eps[len(check.eps) // 2]
        return [
            averaged_function_equicontinuity(
                entry, observables[key], eps, horizon, check, cache
            )
            for key in sorted(observables)
        ]
    if name == "relation_collapse":
        try:
            return [
                check_relation_collapse(
                    entry, check, cache, verdicts=pair_verdicts
                )
            ]
        except CapabilityError as error:
            return [_skipped(name, sys.id, str(error))]
    msg = f"no runner for check {name!r}"
    raise ValueError(msg)


def _unique_ergodicity(
    entry: CatalogEntry, config: ExperimentConfig
) -> dict[str, Any] | None:
    sys = entry.system
    observables = sys.observables()
    if not observables:
        return None
    horizon = min(config.check.horizon_for(sys), DIAGNOSTIC_HORIZON)
    report = unique_ergodicity_check(
        sys,
        [observables[key] for key in sorted(observables)],
        sample_points(entry, 8, config.rng_seed),
        geometric_schedule(horizon),
        config.check.ue_tail,
        config.check.ue_margin,
    )
    return report.to_json()


def analyze_system(
    entry: CatalogEntry,
    entries: Sequence[CatalogEntry],
    config: ExperimentConfig,
    cache: ScanCache,
) -> dict[str, Any]:
    """The report section of one system."""
    section: dict[str, Any] = {"entry": entry.to_json()}
    with log_timing(logger, f"analyze {entry.id}"):
        verdicts = cache.verdicts(entry, config.properties)
        section["verdicts"] = {
            prop.value: verdicts[prop].to_json() for prop in config.properties
        }
        checks: list[ConsistencyReport] = []
        pair_verdicts: list[PairVerdict] = []
        for name in config.checks:
            if name == "unique_ergodicity":
                section["unique_ergodicity"] = _unique_ergodicity(
                    entry, config
                )
            elif name == "lemma_6_4":
                report, q_verdicts = _lemma_6_4(entry, config, cache)
                checks.append(report)
                pair_verdicts.extend(q_verdicts)
            else:
                checks.extend(
                    _run_check(
                        name, entry, entries, config, cache, pair_verdicts
                    )
                )
        section["checks"] = [report.to_json() for report in checks]
        section["pair_verdicts"] = [v.to_json() for v in pair_verdicts]
    return section


def run_experiment(config: ExperimentConfig) -> dict[str, Any]:
    """Run every configured property and check on every configured system.

    Systems run in parallel, the report is assembled in config order.
    """
    started = time.time()
    entries = build_catalog(config.catalog)
    selected = [find_entry(entries, id_) for id_ in config.system_ids]
    cache = ScanCache(config.check)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        sections = list(
            pool.map(
                lambda entry: analyze_system(entry, entries, config, cache),
                selected,
            )
        )
    systems = dict(zip(config.system_ids, sections, strict=True))
    contradictions = sorted(
        f"{check['check']}:{check['system']}"
        for section in sections
        for check in section["checks"]
        if check["status"] == CheckStatus.CONTRADICTION.value
    )
    return {
        "tool_version": tool_version(),
        "config": config.echo(),
        "systems": systems,
        "contradictions": contradictions,
        RUN_KEY: {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "wall_time": time.time() - started,
        },
    }


def dumps(report: dict[str, Any]) -> str:
    """Stable JSON text of a report."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def series_csv(points: Sequence[Sequence[float]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "y"])
    writer.writerows(points)
    return out.getvalue()


def write_report(
    report: dict[str, Any], output_dir: Path, fmt: str = "json"
) -> list[Path]:
    """Validate and write the report, return the written files."""
    validate_report(report)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    with log_timing(logger, f"write report to {output_dir}"):
        if fmt in {"json", "both"}:
            path = output_dir / "report.json"
            path.write_text(dumps(report), encoding="utf-8")
            written.append(path)
        if fmt in {"csv", "both"}:
            folder = output_dir / "series"
            folder.mkdir(exist_ok=True)
            for selector, points in sorted(report_series(report).items()):
                path = folder / (selector.replace("/", "__") + ".csv")
                path.write_text(series_csv(points), encoding="utf-8")
                written.append(path)
    return written


def load_report(path: str | Path) -> dict[str, Any]:
    report: dict[str, Any] = json.loads(
        Path(path).read_text(encoding="utf-8")
    )
    return report


# Plot series. Selectors are ``<system>/<property>/witness/<kind>``,
# ``<system>/<property>/modulus``, ``<system>/unique_ergodicity/<f>`` and
# ``<system>/averaged_function_equicontinuity/<f>``.


def report_series(report: dict[str, Any]) -> dict[str, list[list[float]]]:
    """Every plottable ``(x, y)`` series of a report by selector."""
    series: dict[str, list[list[float]]] = {}
    for system, section in report["systems"].items():
        for prop, verdict in section.get("verdicts", {}).items():
            cells = verdict["scan"]["per_eps"]
            series[f"{system}/{prop}/modulus"] = [
                [cell["eps"], cell["found_delta"]]
                for cell in cells
                if cell["found_delta"] is not None
            ]
            refuting = [c for c in cells if c["refutation"] is not None]
            if refuting:
                estimate = refuting[0]["refutation"]["estimate"]
                key = f"{system}/{prop}/witness/{estimate['kind']}"
                series[key] = estimate["partials"]
        ue = section.get("unique_ergodicity")
        if ue:
            for f_id, curve in ue["spread_curves"].items():
                series[f"{system}/unique_ergodicity/{f_id}"] = curve
        for check in section.get("checks", []):
            if check["check"] == "averaged_function_equicontinuity":
                details = check["details"]
                series[
                    f"{system}/averaged_function_equicontinuity/"
                    f"{details['f']}"
                ] = [
                    [d, w]
                    for d, w in zip(
                        details["deltas"], details["worst"], strict=True
                    )
                ]
    return series


def select_series(
    report: dict[str, Any], selector: str
) -> list[list[float]]:
    """The series named by ``selector``.

    Raises:
        SeriesError: If there is no such series.
    """
    series = report_series(report)
    if selector in series:
        return series[selector]
    if "/witness" in selector and not any(
        "/witness/" in key for key in series
    ):
        msg = "no witness series"
        raise SeriesError(msg)
    msg = f"unknown series {selector!r}"
    raise SeriesError(msg)
