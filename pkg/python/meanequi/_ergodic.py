"""Birkhoff averages and unique ergodicity diagnostics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from logging import getLogger
from typing import Any
from typing import TYPE_CHECKING

import numpy as np

from meanequi._metrics import window_maxima
from meanequi._types import EmptyScheduleError
from meanequi._types import HorizonError
from meanequi._types import PreconditionError
from meanequi._util import running_sums
from meanequi._util import tail_half

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

    from meanequi._spaces import Observable
    from meanequi._spaces import Point
    from meanequi._spaces import System

logger = getLogger(__name__)

UE_TAIL_TOLERANCE = 0.02
UE_MARGIN = 0.2


class UEOutcome(str, Enum):
    CONSISTENT = "ConsistentWithUE"
    REFUTED = "RefutedUE"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class BirkhoffSeries:
    """``f_n(x)`` along a schedule of ``n``."""

    f_id: str
    base: Point
    schedule: list[int]
    values: list[float]
    bound: float

    def to_json(self) -> dict[str, Any]:
        return {
            "f": self.f_id,
            "base": self.base.describe(),
            "schedule": self.schedule,
            "values": self.values,
            "bound": self.bound,
        }

    def to_csv(self) -> str:
        """The series as ``n,value`` rows with a header."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "value"])
        writer.writerows(zip(self.schedule, self.values, strict=True))
        return out.getvalue()


def _check_schedule(schedule: Sequence[int]) -> list[int]:
    schedule = [int(n) for n in schedule]
    if not schedule:
        msg = "empty schedule"
        raise EmptyScheduleError(msg)
    if schedule[0] < 1 or any(
        b <= a for a, b in zip(schedule, schedule[1:], strict=False)
    ):
        msg = "schedule must be positive and strictly increasing"
        raise EmptyScheduleError(msg)
    return schedule


def birkhoff_values(
    sys: System, f: Observable, x: Point, schedule: Sequence[int]
) -> NDArray[np.float64]:
    values = sys.evaluate(f, x, schedule[-1])
    sums = running_sums(values)
    lengths = np.asarray(schedule, dtype=np.int64)
    averages = sums[lengths] / lengths
    return np.clip(averages, -f.bound, f.bound)


def birkhoff(
    sys: System, f: Observable, x: Point, schedule: Sequence[int]
) -> BirkhoffSeries:
    """``(1/n) sum_{i<n} f(T^i x)`` for every ``n`` of the schedule."""
    schedule = _check_schedule(schedule)
    values = birkhoff_values(sys, f, x, schedule)
    return BirkhoffSeries(f.id, x, schedule, values.tolist(), f.bound)


@dataclass(frozen=True)
class UniqueErgodicityReport:
    """Spread of Birkhoff averages over a set of sample points.

    ``spread_curves`` maps every function id to ``(n, max - min)`` points.
    A refutation names two points and the time at which their averages
    differ by at least the margin.
    """

    outcome: UEOutcome
    spread_curves: dict[str, list[tuple[int, float]]]
    limit_spread_estimate: float
    refutation: dict[str, Any] | None = None
    parameters: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "outcome": self.outcome.value,
            "spread_curves": {
                key: [[n, s] for n, s in curve]
                for key, curve in sorted(self.spread_curves.items())
            },
            "limit_spread_estimate": self.limit_spread_estimate,
            "refutation": self.refutation,
            "parameters": self.parameters,
        }


def unique_ergodicity_check(
    sys: System,
    f_list: Sequence[Observable],
    sample_points: Sequence[Point],
    schedule: Sequence[int],
    tail_tolerance: float = UE_TAIL_TOLERANCE,
    margin: float = UE_MARGIN,
) -> UniqueErgodicityReport:
    """Check that Birkhoff averages converge to a constant.

    With sample points taken from a single orbit this tests the unique
    ergodicity of that orbit closure.
    """
    if len(sample_points) < 2:
        msg = "unique ergodicity check needs at least two sample points"
        raise PreconditionError(msg)
    if not f_list:
        msg = "unique ergodicity check needs at least one function"
        raise PreconditionError(msg)
    schedule = _check_schedule(schedule)
    curves: dict[str, list[tuple[int, float]]] = {}
    refutation = None
    consistent = True
    limit = 0.0
    for f in f_list:
        table = np.vstack(
            [birkhoff_values(sys, f, x, schedule) for x in sample_points]
        )
        spread = (table.max(axis=0) - table.min(axis=0)).tolist()
        curves[f.id] = list(zip(schedule, spread, strict=True))
        tail = tail_half(spread)
        limit = max(limit, spread[-1])
        if max(tail) > tail_tolerance:
            consistent = False
        if refutation is None and min(tail) >= margin:
            high = int(np.argmax(table[:, -1]))
            low = int(np.argmin(table[:, -1]))
            refutation = {
                "f": f.id,
                "points": [
                    sample_points[high].describe(),
                    sample_points[low].describe(),
                ],
                "n": schedule[-1],
                "difference": spread[-1],
            }
    if refutation is not None:
        outcome = UEOutcome.REFUTED
    elif consistent:
        outcome = UEOutcome.CONSISTENT
    else:
        outcome = UEOutcome.INCONCLUSIVE
    return UniqueErgodicityReport(
        outcome,
        curves,
        limit,
        refutation,
        {
            "schedule": schedule,
            "tail_tolerance": tail_tolerance,
            "margin": margin,
            "points": len(sample_points),
        },
    )


def orbit_sample(
    sys: System, x: Point, count: int, spacing: int
) -> list[Point]:
    """``count`` points ``T^(k * spacing) x`` of a single orbit."""
    points = [x]
    for _ in range(count - 1):
        points.append(sys.iterate(points[-1], spacing))
    return points


@dataclass(frozen=True)
class WindowIndependenceReport:
    """Per window length, the largest gap between a window average and the
    prefix average at the horizon."""

    f_id: str
    horizon: int
    prefix_average: float
    curve: list[tuple[int, float]]
    converges: bool
    tolerance: float

    def to_json(self) -> dict[str, Any]:
        return {
            "f": self.f_id,
            "horizon": self.horizon,
            "prefix_average": self.prefix_average,
            "curve": [[L, gap] for L, gap in self.curve],
            "converges": self.converges,
            "tolerance": self.tolerance,
        }


def window_average_independence(
    sys: System,
    f: Observable,
    x: Point,
    window_lengths: Sequence[int],
    horizon: int,
    tolerance: float = UE_TAIL_TOLERANCE,
) -> WindowIndependenceReport:
    """Compare window averages of ``f`` along an orbit with its mean."""
    window_lengths = _check_schedule(window_lengths)
    if window_lengths[-1] > horizon:
        msg = f"window length {window_lengths[-1]} exceeds {horizon}"
        raise HorizonError(msg)
    values = sys.evaluate(f, x, horizon)
    sums = running_sums(values)
    mean = float(sums[-1]) / horizon
    above = window_maxima(values, window_lengths, sums) - mean
    negated = -values
    lowest = window_maxima(negated, window_lengths, running_sums(negated))
    below = mean + lowest
    gaps = np.maximum(above, below).tolist()
    return WindowIndependenceReport(
        f.id,
        horizon,
        mean,
        list(zip(window_lengths, gaps, strict=True)),
        gaps[-1] <= tolerance,
        tolerance,
    )
