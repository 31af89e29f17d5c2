#!/usr/bin/env python3
"""Maintenance utilities for meanequi reports."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

import numpy as np
from click import argument
from click import group
from click import option
from click import secho

from meanequi import CheckConfig
from meanequi import PairOutcome
from meanequi import Property
from meanequi import Relation
from meanequi import banach_proximal_test
from meanequi import besicovitch_estimate
from meanequi import build_catalog
from meanequi import find_entry
from meanequi import point_from_json
from meanequi import sup_dbar
from meanequi import weyl_estimate
from meanequi._catalog import SEQUENCE_FUNCTIONS
from meanequi._catalog import CatalogOptions
from meanequi._report import load_report
from meanequi._util import geometric_schedule


@group()
def cli() -> None:
    """Various utilities."""


def _catalog_options(echo: dict[str, Any]) -> CatalogOptions:
    return CatalogOptions(
        **{
            key: tuple(value) if isinstance(value, list) else value
            for key, value in echo.items()
        }
    )


def _recompute(
    prop: Property,
    system: Any,
    pair: tuple[Any, Any],
    horizon: int,
    check: CheckConfig,
) -> float | None:
    x, y = pair
    if prop is Property.MEAN_EQ:
        schedule = geometric_schedule(horizon)
        return besicovitch_estimate(system, x, y, schedule).value
    if prop is Property.EQ_IN_MEAN:
        return sup_dbar(system, x, y, horizon).value
    if prop is Property.WEYL_MEAN_EQ:
        windows = check.windows_for(horizon)
        return weyl_estimate(system, x, y, windows, horizon).value
    return None


def _rebuild(point: dict[str, Any], options: CatalogOptions) -> Any:
    return point_from_json(point, SEQUENCE_FUNCTIONS, options.symbol_memo_cap)


def _proximal_errors(
    system: Any, x: Any, y: Any, pair: dict[str, Any]
) -> list[str]:
    horizon = pair["parameters"]["horizon"]
    trace = system.distance_trace(x, y, horizon + 1)
    return [
        f"eps={eps} n={n} distance {trace[n]:.6g}"
        for eps, n in pair["witness"]["times"].items()
        if not trace[n] < float(eps)
    ]


def _regional_errors(
    system: Any, x: Any, y: Any, pair: dict[str, Any], options: CatalogOptions
) -> list[str]:
    witness = pair["witness"]
    eps = pair["parameters"]["eps"]
    a = _rebuild(witness["x_prime"], options)
    b = _rebuild(witness["y_prime"], options)
    n = witness["n"]
    errors = []
    if not system.metric(x, a) < eps or not system.metric(y, b) < eps:
        errors.append("x', y' not within eps of the pair")
    distance = system.distance_trace(a, b, n + 1)[n]
    if not distance < eps:
        errors.append(f"n={n} distance {distance:.6g}")
    return errors


def _mean_sensitive_errors(
    system: Any,
    x: Any,
    y: Any,
    pair: dict[str, Any],
    options: CatalogOptions,
    tolerance: float,
) -> list[str]:
    tau = pair["parameters"]["tau"]
    budget = pair["parameters"]["search_budget"]
    errors = []
    for eps, best in pair["witness"].get("per_eps", {}).items():
        n = best["n"]
        if n is None:
            continue
        a = _rebuild(best["x_prime"], options)
        b = _rebuild(best["y_prime"], options)
        if not system.metric(a, b) < float(eps):
            errors.append(f"eps={eps} x', y' too far apart")
        near_x = system.distances_to(system.frame(a, budget), x)[:n] < tau
        near_y = system.distances_to(system.frame(b, budget), y)[:n] < tau
        frequency = float(np.count_nonzero(near_x & near_y)) / n
        if abs(frequency - best["frequency"]) > tolerance:
            errors.append(
                f"eps={eps} frequency {frequency:.6g} "
                f"!= {best['frequency']:.6g}"
            )
    return errors


def _banach_errors(
    system: Any, x: Any, y: Any, pair: dict[str, Any], tolerance: float
) -> list[str]:
    parameters = pair["parameters"]
    verdict = banach_proximal_test(
        system,
        x,
        y,
        parameters["eps"],
        parameters["horizon"],
        parameters["window_lengths"],
        parameters["theta"],
    )
    recomputed = verdict.witness["upper_banach"]
    return [
        f"eps={eps} upper Banach {recomputed[eps]:.6g} != {value:.6g}"
        for eps, value in pair["witness"]["upper_banach"].items()
        if abs(recomputed[eps] - value) > tolerance
    ]


def _pair_errors(
    system: Any,
    pair: dict[str, Any],
    options: CatalogOptions,
    tolerance: float,
) -> list[str] | None:
    """What fails to replay in a pair witness, None if nothing to replay."""
    relation = Relation(pair["relation"])
    outcome = PairOutcome(pair["outcome"])
    x, y = (_rebuild(point, options) for point in pair["pair"])
    if relation is Relation.BANACH_PROXIMAL:
        return _banach_errors(system, x, y, pair, tolerance)
    if outcome is not PairOutcome.HOLDS:
        return None
    if relation is Relation.PROXIMAL:
        return _proximal_errors(system, x, y, pair)
    if relation is Relation.REGIONALLY_PROXIMAL:
        return _regional_errors(system, x, y, pair, options)
    if "per_eps" not in pair["witness"]:
        return None
    return _mean_sensitive_errors(system, x, y, pair, options, tolerance)


@cli.command()
@argument("report", type=Path)
@option("--tolerance", default=1e-9, show_default=True)
def verify_witnesses(report: Path, tolerance: float) -> None:
    """Re-run the estimators on every refuting pair of a report.

    Pair verdicts are replayed as well: proximal return times, regionally
    proximal witnesses, mean-sensitive frequencies and upper Banach
    densities.

    The catalog is rebuilt from the configuration recorded in the report.
    """
    data = load_report(report)
    echo = data["config"]
    options = _catalog_options(echo["catalog"])
    check = CheckConfig(
        window_lengths=(
            tuple(echo["grids"]["window_lengths"])
            if echo["grids"].get("window_lengths")
            else None
        )
    )
    catalog = build_catalog(options)
    mismatches = 0
    for system_id, section in data["systems"].items():
        system = find_entry(catalog, system_id).system
        for name, verdict in section["verdicts"].items():
            prop = Property(name)
            scan = verdict["scan"]
            for cell in scan["per_eps"]:
                refutation = cell["refutation"]
                if refutation is None:
                    continue
                pair = tuple(
                    _rebuild(point, options) for point in refutation["pair"]
                )
                value = _recompute(prop, system, pair, scan["horizon"], check)
                label = f"{system_id}/{name} eps={cell['eps']}"
                if value is None:
                    secho(f"SKIP: {label}", fg="yellow")
                    continue
                recorded = refutation["estimate"]["value"]
                if abs(value - recorded) <= tolerance:
                    secho(f"OK: {label} {value:.6g}", fg="green")
                else:
                    mismatches += 1
                    secho(
                        f"MISMATCH: {label} {value:.6g} != {recorded:.6g}",
                        fg="red",
                    )
        for pair in section.get("pair_verdicts", []):
            errors = _pair_errors(system, pair, options, tolerance)
            label = f"{system_id}/{pair['relation']} {pair['outcome']}"
            if errors is None:
                secho(f"SKIP: {label}", fg="yellow")
            elif errors:
                mismatches += 1
                secho(f"MISMATCH: {label} {'; '.join(errors)}", fg="red")
            else:
                secho(f"OK: {label}", fg="green")
    if mismatches:
        sys.exit(1)


if __name__ == "__main__":
    cli()
