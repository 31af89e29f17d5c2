"""Test window statistics and densities."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import booleans
from hypothesis.strategies import data
from hypothesis.strategies import integers
from hypothesis.strategies import lists

from meanequi import EmptyScheduleError
from meanequi import HorizonError
from meanequi import IndexTrace
from meanequi import banach_density_estimate
from meanequi import density_estimate
from meanequi import estimate_densities
from meanequi import window_fraction
from meanequi._densities import banach_curve
from meanequi._densities import prefix_fractions

if TYPE_CHECKING:
    from hypothesis.strategies import DataObject

EVENS = IndexTrace(np.arange(10_000) % 2 == 0)


def _factorial_blocks() -> IndexTrace:
    """``F = union of [k!, k! + k)`` for ``k <= 10``."""
    indices = [
        i
        for k in range(1, 11)
        for i in range(math.factorial(k), math.factorial(k) + k)
    ]
    return IndexTrace.from_indices(indices, math.factorial(10) + 10)


def test_window_fraction() -> None:
    assert window_fraction(EVENS, 0, 9) == 0.5
    assert window_fraction(IndexTrace(np.zeros(20, bool)), 3, 17) == 0.0

    squares = IndexTrace.from_indices((k * k for k in range(10)), 100)
    assert window_fraction(squares, 0, 99) == pytest.approx(0.1)

    with pytest.raises(HorizonError):
        window_fraction(EVENS, 5, 10_000)
    with pytest.raises(HorizonError):
        window_fraction(EVENS, 6, 5)


def test_runs_encoding(runs_doc: IndexTrace) -> None:
    """
    2 3 1
    """
    assert runs_doc.bits.tolist() == [False, False, True, True, True, False]
    assert runs_doc.to_runs() == "2 3 1"
    assert IndexTrace.from_runs("0 2 1").to_runs() == "0 2 1"

    with pytest.raises(HorizonError):
        IndexTrace.from_runs("0")


def test_density_estimate() -> None:
    lower, upper = density_estimate(EVENS, [100, 1000, 10_000])
    assert lower == pytest.approx(0.5, abs=0.01)
    assert upper == pytest.approx(0.5, abs=0.01)

    horizon = 10**6
    squares = IndexTrace.from_indices(
        (k * k for k in range(1001)), horizon
    )
    schedule = [k * 100_000 for k in range(1, 11)]
    assert density_estimate(squares, schedule).upper <= 0.002

    with pytest.raises(EmptyScheduleError):
        density_estimate(EVENS, [])
    with pytest.raises(EmptyScheduleError):
        density_estimate(EVENS, [100, 10])


def test_density_of_growing_blocks() -> None:
    horizon = 2**20
    bits = np.zeros(horizon, dtype=bool)
    for k in range(10):
        bits[4**k : 2 * 4**k] = True
    trace = IndexTrace(bits)
    lower, upper = density_estimate(trace, [2**j for j in range(1, 21)])
    assert lower == pytest.approx(1 / 3, abs=0.05)
    assert upper == pytest.approx(2 / 3, abs=0.05)


def test_banach_density_of_evens() -> None:
    for length in (2, 8, 64):
        assert banach_density_estimate(EVENS, [length]) == (0.5, 0.5)
    assert banach_density_estimate(EVENS, [1]) == (0.0, 1.0)


def test_density_and_banach_density_separate() -> None:
    trace = _factorial_blocks()
    # a full window [8!, 8! + 8) exists
    assert banach_density_estimate(trace, [1, 2, 4, 8]).upper == 1.0
    schedule = [10**k for k in range(1, 7)]
    assert density_estimate(trace, schedule).upper <= 0.01

    estimate = estimate_densities(trace, schedule, [1, 2, 4, 8])
    assert estimate.upper_banach == 1.0
    assert estimate.lower_banach <= estimate.lower_density
    assert estimate.upper_density <= estimate.upper_banach
    assert len(estimate.partials) == 4


def test_estimate_densities_ordering(runs_doc: IndexTrace) -> None:
    """
    5 1 3 1 9 2 30 7 1 1 80 40 3
    """
    estimate = estimate_densities(runs_doc)
    assert estimate.lower_banach <= estimate.lower_density
    assert estimate.lower_density <= estimate.upper_density
    assert estimate.upper_density <= estimate.upper_banach
    assert estimate.to_json()["horizon"] == runs_doc.horizon


def test_bad_window_lengths() -> None:
    with pytest.raises(EmptyScheduleError):
        banach_density_estimate(EVENS, [])
    with pytest.raises(HorizonError):
        banach_density_estimate(EVENS, [20_000])


@given(lists(booleans(), min_size=1, max_size=300), data())
def test_sliding_windows_match_enumeration(
    bits: list[bool], draw: DataObject
) -> None:
    trace = IndexTrace(np.asarray(bits))
    length = draw.draw(integers(1, len(bits)))
    fractions = [
        window_fraction(trace, m, m + length - 1)
        for m in range(len(bits) - length + 1)
    ]
    (bounds,) = banach_curve(trace, [length])
    assert bounds == (min(fractions), max(fractions))


@given(lists(booleans(), min_size=2, max_size=300))
def test_prefix_average_between_window_extremes(bits: list[bool]) -> None:
    trace = IndexTrace(np.asarray(bits))
    for length in range(1, len(bits) + 1):
        (bounds,) = banach_curve(trace, [length])
        (prefix,) = prefix_fractions(trace, [length])
        assert bounds.lower <= prefix <= bounds.upper
