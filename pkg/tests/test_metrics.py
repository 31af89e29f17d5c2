"""Test mean orbit distances."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats
from hypothesis.strategies import integers
from hypothesis.strategies import lists

from meanequi import EmptyScheduleError
from meanequi import HorizonError
from meanequi import MetricKind
from meanequi import TorusPoint
from meanequi import besicovitch_estimate
from meanequi import dbar_n
from meanequi import sup_dbar
from meanequi import weyl_estimate
from meanequi import windowed_uniform_bound
from meanequi._catalog import GOLDEN
from meanequi._catalog import constant_point
from meanequi._catalog import prefix_point
from meanequi._metrics import window_maxima
from meanequi._spaces import Rotation
from meanequi._spaces import SquaringMap
from meanequi._util import derive_rng
from meanequi._util import geometric_schedule
from meanequi._util import running_sums

if TYPE_CHECKING:
    from collections.abc import Callable

    from meanequi import CatalogEntry

ROTATION = Rotation("golden", (GOLDEN,))
SQUARING = SquaringMap(upper=0.99)


def test_dbar_n(entry: Callable[[str], CatalogEntry]) -> None:
    shift = entry("full_shift").system
    x, y = constant_point(0), prefix_point(3)
    assert dbar_n(shift, x, y, 6) == pytest.approx(3.875 / 6)
    assert dbar_n(shift, x, x, 6) == 0.0

    with pytest.raises(HorizonError):
        dbar_n(shift, x, y, 0)


def test_isometry_exactness() -> None:
    rng = derive_rng(1)
    for _ in range(100):
        x, y = ROTATION.sample_point(rng), ROTATION.sample_point(rng)
        distance = ROTATION.metric(x, y)
        trace = ROTATION.distance_trace(x, y, 10_000)
        averages = running_sums(trace)[1:] / np.arange(1, 10_001)
        assert np.max(np.abs(averages - distance)) <= 1e-12


def test_sup_dbar(entry: Callable[[str], CatalogEntry]) -> None:
    shift = entry("full_shift").system
    estimate = sup_dbar(shift, constant_point(0), prefix_point(3), 6)
    assert estimate.kind is MetricKind.SUP_OVER_ALL_N
    assert estimate.value == pytest.approx(0.6458333333333334)

    x, y = TorusPoint.of(0.2), TorusPoint.of(0.3)
    for horizon in (1, 10, 1000):
        value = sup_dbar(ROTATION, x, y, horizon).value
        assert value == pytest.approx(0.1, abs=1e-12)
    assert sup_dbar(ROTATION, x, x, 50).value == 0.0


def test_besicovitch_estimate(entry: Callable[[str], CatalogEntry]) -> None:
    shift = entry("full_shift").system
    estimate = besicovitch_estimate(
        shift, constant_point(0), prefix_point(3), geometric_schedule(1000)
    )
    assert estimate.value >= 0.99
    assert estimate.pair is not None
    partials = [value for _, value in estimate.partials]
    assert partials == sorted(partials)

    squaring = besicovitch_estimate(
        SQUARING,
        TorusPoint.of(0.5),
        TorusPoint.of(0.6),
        geometric_schedule(1000),
    )
    assert squaring.value <= 0.01

    with pytest.raises(EmptyScheduleError):
        besicovitch_estimate(
            SQUARING, TorusPoint.of(0.5), TorusPoint.of(0.6), []
        )


def test_witness_family_is_far_apart_in_the_mean(
    entry: Callable[[str], CatalogEntry],
) -> None:
    shift = entry("full_shift").system
    schedule = geometric_schedule(10_000)
    for k in range(5, 21):
        x, y = constant_point(0), prefix_point(k)
        assert shift.metric(x, y) == 2.0**-k
        assert besicovitch_estimate(shift, x, y, schedule).value >= 0.9


def test_weyl_estimate() -> None:
    x, y = TorusPoint.of(0.0), TorusPoint.of(0.3)
    rotation = weyl_estimate(ROTATION, x, y, [1, 8, 64], 1000)
    assert rotation.kind is MetricKind.WEYL
    assert rotation.value == pytest.approx(0.3, abs=1e-12)
    assert weyl_estimate(ROTATION, x, x, [1, 8], 100).value == 0.0

    a, b = TorusPoint.of(0.5), TorusPoint.of(0.6)
    trace = SQUARING.distance_trace(a, b, 10_000)
    (first_window,) = window_maxima(trace, [64])
    assert first_window == pytest.approx(trace[:64].mean())
    curve = weyl_estimate(SQUARING, a, b, [64, 256, 1024], 10_000).partials
    values = [value for _, value in curve]
    assert values == sorted(values, reverse=True)

    with pytest.raises(EmptyScheduleError):
        weyl_estimate(ROTATION, x, y, [], 100)
    with pytest.raises(HorizonError):
        weyl_estimate(ROTATION, x, y, [200], 100)


def test_windowed_uniform_bound(entry: Callable[[str], CatalogEntry]) -> None:
    x, y = TorusPoint.of(0.1), TorusPoint.of(0.35)
    bound = windowed_uniform_bound(ROTATION, x, y, 1, 64, 500)
    assert bound == pytest.approx(0.25, abs=1e-12)
    assert windowed_uniform_bound(ROTATION, x, x, 1, 64, 500) == 0.0

    shift = entry("full_shift").system
    ones = windowed_uniform_bound(
        shift, constant_point(0), prefix_point(3), 1, 16, 100
    )
    assert ones == 1.0

    with pytest.raises(HorizonError):
        windowed_uniform_bound(ROTATION, x, y, 10, 5, 100)
    with pytest.raises(HorizonError):
        windowed_uniform_bound(ROTATION, x, y, 1, 200, 100)


@given(lists(floats(0.0, 1.0), min_size=1, max_size=2000))
def test_running_sums_match_fsum(values: list[float]) -> None:
    sums = running_sums(values)
    for k in range(0, len(values) + 1, max(1, len(values) // 50)):
        assert abs(sums[k] - math.fsum(values[:k])) <= 1e-10


@given(lists(floats(0.0, 1.0), min_size=2, max_size=400), integers(1, 100))
def test_window_maxima_match_brute_force(
    values: list[float], length: int
) -> None:
    length = min(length, len(values))
    brute = max(
        math.fsum(values[j : j + length]) / length
        for j in range(len(values) - length + 1)
    )
    (fast,) = window_maxima(values, [length])
    assert fast == pytest.approx(brute, abs=1e-10)


@given(lists(floats(0.0, 1.0), min_size=4, max_size=400), integers(1, 100))
def test_longer_windows_do_not_raise_the_maximum(
    values: list[float], length: int
) -> None:
    length = min(length, len(values) // 2)
    shorter, longer = window_maxima(values, [length, 2 * length])
    assert longer <= shorter + 1e-12
