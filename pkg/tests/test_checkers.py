"""Test modulus scans and the cross-checks."""

from __future__ import annotations

from dataclasses import replace
from typing import Any
from typing import TYPE_CHECKING

import numpy as np
import pytest

from meanequi import CatalogEntry
from meanequi import CheckStatus
from meanequi import EmptyScheduleError
from meanequi import Flags
from meanequi import Observable
from meanequi import Outcome
from meanequi import PreconditionError
from meanequi import Property
from meanequi import ResolutionError
from meanequi import ScaledSystem
from meanequi import ScanCache
from meanequi import TorusPoint
from meanequi import averaged_function_convergence
from meanequi import averaged_function_equicontinuity
from meanequi import besicovitch_estimate
from meanequi import check_mean_l_stability
from meanequi import check_product_closure
from meanequi import check_property
from meanequi import check_relation_collapse
from meanequi import check_theorem_3_6
from meanequi import check_theorem_3_8
from meanequi import check_theorem_5_1
from meanequi import check_theorem_5_3
from meanequi import check_weakly_mixing_fixed_point
from meanequi import point_from_json
from meanequi import scan_modulus
from meanequi._checkers import scan_outcome
from meanequi._spaces import FiniteSystem
from meanequi._util import geometric_schedule

if TYPE_CHECKING:
    from collections.abc import Callable

    from meanequi import CheckConfig


def test_rotation_is_certified(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    verdict = small_cache.verdict(entry("rotation"), Property.MEAN_EQ)
    assert verdict.outcome is Outcome.CERTIFIED
    for cell in verdict.scan.per_eps:
        assert cell.found_delta is not None
        assert cell.found_delta <= cell.eps
        assert cell.worst_below is not None
        assert cell.worst_below < cell.eps
    assert verdict.scan.horizon == small_config.horizon_numeric
    assert any("not a proof" in note for note in verdict.notes)


def test_full_shift_is_refuted(
    entry: Callable[[str], CatalogEntry], small_cache: ScanCache
) -> None:
    full_shift = entry("full_shift")
    verdict = small_cache.verdict(full_shift, Property.MEAN_EQ)
    assert verdict.outcome is Outcome.REFUTED

    (cell, *_) = verdict.scan.per_eps
    assert cell.eps == 0.5
    refutation = cell.refutation
    assert refutation is not None
    assert refutation.distance < refutation.delta

    # the recorded pair reproduces the statistic
    x, y = (point_from_json(p) for p in refutation.to_json()["pair"])
    estimate = besicovitch_estimate(
        full_shift.system, x, y, geometric_schedule(verdict.scan.horizon)
    )
    assert estimate.value == pytest.approx(refutation.estimate.value)
    assert estimate.value >= cell.eps


def test_equivalences(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    full_shift = entry("full_shift")
    report = check_theorem_3_8(full_shift, small_config, small_cache)
    assert report.status is CheckStatus.CONSISTENT
    assert report.details == {"mean_eq": "Refuted", "eq_in_mean": "Refuted"}

    report = check_theorem_5_1(full_shift, small_config, small_cache)
    assert report.status is CheckStatus.CONSISTENT
    assert not report.contradicts

    rotation = entry("rotation")
    for check in (check_theorem_3_8, check_theorem_5_1):
        report = check(rotation, small_config, small_cache)
        assert report.status is CheckStatus.CONSISTENT
        assert report.system == "rotation"


def test_theorem_5_3(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    report = check_theorem_5_3(
        entry("rotation"), small_config, small_cache, horizon=2000
    )
    assert report.status is CheckStatus.CONSISTENT
    hit = report.details["per_eps"]["0.5"]
    assert (hit["delta"], hit["N"]) == (0.5, 1)
    for hit in report.details["per_eps"].values():
        assert hit["N"] == 1
        assert hit["bound"] < hit["delta"]

    with pytest.raises(PreconditionError):
        check_theorem_5_3(entry("full_shift"), small_config, small_cache)


def test_product_closure(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    torus = entry("rotation_x_rotation")
    silver = torus.system.factors[1]  # type: ignore[attr-defined]
    report = check_product_closure(
        entry("rotation"), silver, torus, small_config, small_cache
    )
    assert report.status is CheckStatus.CONSISTENT
    assert report.details["product"] == "CertifiedAtScale"

    report = check_product_closure(
        entry("rotation"),
        entry("full_shift"),
        entry("rotation_x_full_shift"),
        small_config,
        small_cache,
    )
    assert report.status is CheckStatus.CONSISTENT
    assert report.details == {
        "property": "mean_eq",
        "factors": {"rotation": "CertifiedAtScale", "full_shift": "Refuted"},
        "product": "Refuted",
    }


def test_averaged_function_equicontinuity(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    rotation = entry("rotation")
    cos = rotation.system.observables()["cos0"]
    report = averaged_function_equicontinuity(
        rotation, cos, 0.25, 1000, small_config, small_cache
    )
    assert report.status is CheckStatus.CONSISTENT
    assert report.details["uniform"]
    assert report.details["eq_in_mean"] == "CertifiedAtScale"

    constant = Observable(
        "constant", lambda frame: np.full(frame.shape[0], 0.5), 0.5
    )
    report = averaged_function_equicontinuity(
        rotation, constant, 0.25, 1000, small_config, small_cache
    )
    assert report.details["found_delta"] == small_config.delta[0]

    full_shift = entry("full_shift")
    x0 = full_shift.system.observables()["x0"]
    report = averaged_function_equicontinuity(
        full_shift, x0, 0.5, 1000, small_config, small_cache
    )
    assert report.details["found_delta"] is None
    assert report.status is CheckStatus.CONSISTENT


def test_relation_collapse(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    report = check_relation_collapse(
        entry("rotation"), small_config, small_cache
    )
    assert report.details["containment_violations"] == 0
    assert report.status is not CheckStatus.CONTRADICTION
    assert len(report.details["rows"]) == 8


def test_theorem_3_6(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    report = check_theorem_3_6(
        entry("rotation"), small_config, small_cache, horizon=100_000
    )
    assert report.status is CheckStatus.CONSISTENT

    skipped = check_theorem_3_6(entry("full_shift"), small_config, small_cache)
    assert skipped.status is CheckStatus.SKIPPED


@pytest.mark.parametrize(
    "system_id", ["finite_permutation", "finite_contraction"]
)
def test_theorem_3_6_on_finite_systems(
    system_id: str,
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    report = check_theorem_3_6(
        entry(system_id), small_config, small_cache, horizon=100_000
    )
    assert report.status is CheckStatus.CONSISTENT, report.details


def test_weakly_mixing_fixed_point(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    report = check_weakly_mixing_fixed_point(
        entry("rotation"), small_config, small_cache
    )
    assert report.status is CheckStatus.SKIPPED

    distances = np.abs(np.subtract.outer(np.arange(5), np.arange(5))) / 4
    contraction = CatalogEntry(
        FiniteSystem("collapsing", (0, 0, 1, 2, 3), distances),
        {},
        Flags(weakly_mixing=True),
    )
    report = check_weakly_mixing_fixed_point(contraction, small_config)
    assert report.status is CheckStatus.CONSISTENT
    assert report.details["spread"] == 0.0


def test_scan_cache(
    entry: Callable[[str], CatalogEntry], small_config: CheckConfig
) -> None:
    cache = ScanCache(small_config)
    rotation = entry("rotation")
    first = cache.verdict(rotation, Property.EQUICONTINUOUS)
    assert cache.verdict(rotation, Property.EQUICONTINUOUS) is first

    again = check_property(rotation, Property.EQUICONTINUOUS, small_config)
    assert again.to_json() == first.to_json()


def test_scans_do_not_depend_on_threads(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    sturmian = entry("sturmian").system

    def scan() -> dict[str, Any]:
        return scan_modulus(
            sturmian,
            Property.MEAN_EQ,
            small_config.eps,
            small_config.delta,
            4,
            1024,
            rng_seed=5,
        ).to_json()

    single = scan()
    monkeypatch.setenv("MEANEQUI_THREADS", "4")
    assert scan() == single


def test_scan_errors(
    entry: Callable[[str], CatalogEntry], small_config: CheckConfig
) -> None:
    full_shift = entry("full_shift").system
    with pytest.raises(EmptyScheduleError):
        scan_modulus(full_shift, Property.MEAN_EQ, [], [0.5], 2, 100)
    with pytest.raises(EmptyScheduleError):
        scan_modulus(full_shift, Property.MEAN_EQ, [0.1, 0.5], [0.5], 2, 100)
    with pytest.raises(ResolutionError):
        scan_modulus(full_shift, Property.MEAN_EQ, [0.5], [2**-70], 2, 100)

    tiny = replace(small_config, delta=(2**-70,))
    with pytest.raises(ResolutionError):
        check_property(entry("full_shift"), Property.MEAN_EQ, tiny)


def test_mean_l_stability(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    small_cache: ScanCache,
) -> None:
    rotation = check_mean_l_stability(
        entry("rotation"), small_config, small_cache
    )
    assert rotation.details == {
        "mean_eq": "CertifiedAtScale",
        "mean_l_stable": "CertifiedAtScale",
    }
    assert rotation.status is CheckStatus.CONSISTENT

    full_shift = check_mean_l_stability(
        entry("full_shift"), small_config, small_cache
    )
    assert full_shift.details["mean_l_stable"] == "Refuted"
    assert full_shift.status is CheckStatus.CONSISTENT


def test_averaged_function_convergence(
    entry: Callable[[str], CatalogEntry],
) -> None:
    rotation = entry("rotation").system
    cos = rotation.observables()["cos0"]
    schedule = geometric_schedule(10_000)
    diagnostic = averaged_function_convergence(
        rotation, cos, TorusPoint.of(0.0), TorusPoint.of(0.3), schedule
    )
    assert diagnostic.schedule == schedule
    assert abs(diagnostic.values[-1]) < 0.01
    assert diagnostic.spread < 0.1

    with pytest.raises(EmptyScheduleError):
        averaged_function_convergence(
            rotation, cos, TorusPoint.of(0.0), TorusPoint.of(0.3), []
        )


@pytest.mark.parametrize("factor", [2.0, 0.5])
def test_scaled_metric_scales_the_modulus(
    entry: Callable[[str], CatalogEntry],
    small_config: CheckConfig,
    factor: float,
) -> None:
    rotation = entry("rotation").system
    scaled = ScaledSystem(rotation, factor)
    eps = (0.25, 0.125)
    plain = scan_modulus(
        rotation, Property.MEAN_EQ, eps, small_config.delta, 4, 1000
    )
    stretched = scan_modulus(
        scaled,
        Property.MEAN_EQ,
        [e * factor for e in eps],
        [d * factor for d in small_config.delta],
        4,
        1000,
    )
    assert scan_outcome(stretched) is scan_outcome(plain)
    assert scan_outcome(plain) is Outcome.CERTIFIED
    for cell, scaled_cell in zip(
        plain.per_eps, stretched.per_eps, strict=True
    ):
        assert cell.found_delta is not None
        assert scaled_cell.found_delta == cell.found_delta * factor
