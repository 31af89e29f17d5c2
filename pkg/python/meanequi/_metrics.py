"""Mean orbit distances and their limiting regimes."""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from typing import Any
from typing import TYPE_CHECKING

import numpy as np

from meanequi._densities import IndexTrace
from meanequi._densities import density_estimate
from meanequi._types import EmptyScheduleError
from meanequi._types import HorizonError
from meanequi._util import exact_mean
from meanequi._util import geometric_schedule
from meanequi._util import running_sums
from meanequi._util import tail_half

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike
    from numpy.typing import NDArray

    from meanequi._spaces import Point
    from meanequi._spaces import System


class MetricKind(str, Enum):
    """Which regime of the mean distance an estimate describes."""

    PREFIX_AT_N = "prefix_at_n"
    BESICOVITCH = "besicovitch_limsup"
    SUP_OVER_ALL_N = "sup_over_all_n"
    WEYL = "weyl_limsup"
    SUP_DISTANCE = "sup_distance"
    EXCEPTIONAL_DENSITY = "exceptional_upper_density"


@dataclass(frozen=True)
class MeanMetricEstimate:
    """A mean-distance statistic with the curve it was read from.

    ``partials`` holds ``(x, y)`` points: ``(n, dbar_n)`` for prefix
    statistics, ``(L, max window average)`` for window statistics. ``noise``
    is the standard deviation of the tail half of the partials.
    """

    kind: MetricKind
    value: float
    horizon: int
    partials: list[tuple[int, float]] = field(default_factory=list)
    pair: tuple[dict[str, Any], dict[str, Any]] | None = None
    noise: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "value": self.value,
            "horizon": self.horizon,
            "noise": self.noise,
            "partials": [[x, y] for x, y in self.partials],
            "pair": list(self.pair) if self.pair else None,
        }


def _noise(values: Sequence[float]) -> float:
    tail = tail_half(values)
    return float(np.std(tail)) if len(tail) > 1 else 0.0


def _check_lengths(lengths: Sequence[int], horizon: int, what: str) -> None:
    if not lengths:
        msg = f"empty {what}"
        raise EmptyScheduleError(msg)
    if any(b <= a for a, b in zip(lengths, lengths[1:], strict=False)):
        msg = f"{what} must be strictly increasing"
        raise EmptyScheduleError(msg)
    if lengths[0] < 1 or lengths[-1] > horizon:
        msg = f"{what} must lie in [1, {horizon}]"
        raise HorizonError(msg)


def _describe_pair(
    x: Point | None, y: Point | None
) -> tuple[dict[str, Any], dict[str, Any]] | None:
    if x is None or y is None:
        return None
    return (x.describe(), y.describe())


def window_maxima(
    values: ArrayLike,
    lengths: Sequence[int],
    sums: NDArray[np.float64] | None = None,
) -> NDArray[np.float64]:
    """For every ``L``, the largest average of ``L`` consecutive values."""
    if sums is None:
        sums = running_sums(values)
    out = np.empty(len(lengths))
    for index, length in enumerate(lengths):
        if not 1 <= length < sums.shape[0]:
            msg = f"window length {length} exceeds {sums.shape[0] - 1}"
            raise HorizonError(msg)
        out[index] = np.max(sums[length:] - sums[:-length]) / length
    return out


# Statistics of a precomputed distance trace. The module-level operations
# below compute the trace from the system and delegate here.


def besicovitch_of_trace(
    trace: NDArray[np.float64],
    schedule: Sequence[int],
    x: Point | None = None,
    y: Point | None = None,
) -> MeanMetricEstimate:
    _check_lengths(schedule, trace.shape[0], "schedule")
    sums = running_sums(trace)
    lengths = np.asarray(schedule, dtype=np.int64)
    partials = (sums[lengths] / lengths).tolist()
    return MeanMetricEstimate(
        MetricKind.BESICOVITCH,
        max(tail_half(partials)),
        int(schedule[-1]),
        list(zip(schedule, partials, strict=True)),
        _describe_pair(x, y),
        _noise(partials),
    )


def sup_of_trace(
    trace: NDArray[np.float64],
    x: Point | None = None,
    y: Point | None = None,
) -> MeanMetricEstimate:
    horizon = trace.shape[0]
    sums = running_sums(trace)
    averages = sums[1:] / np.arange(1, horizon + 1)
    running = np.maximum.accumulate(averages)
    schedule = geometric_schedule(horizon)
    partials = [float(running[n - 1]) for n in schedule]
    return MeanMetricEstimate(
        MetricKind.SUP_OVER_ALL_N,
        float(running[-1]),
        horizon,
        list(zip(schedule, partials, strict=True)),
        _describe_pair(x, y),
        0.0,
    )


def weyl_of_trace(
    trace: NDArray[np.float64],
    window_lengths: Sequence[int],
    x: Point | None = None,
    y: Point | None = None,
) -> MeanMetricEstimate:
    """Largest window average at the largest window length.

    The value is never below the Besicovitch estimate of the same trace,
    since every prefix is itself a window.
    """
    horizon = trace.shape[0]
    _check_lengths(window_lengths, horizon, "window lengths")
    sums = running_sums(trace)
    curve = window_maxima(trace, window_lengths, sums).tolist()
    schedule = geometric_schedule(horizon)
    prefix = (sums[schedule] / np.asarray(schedule)).tolist()
    value = max(curve[-1], max(tail_half(prefix)))
    return MeanMetricEstimate(
        MetricKind.WEYL,
        value,
        horizon,
        list(zip(window_lengths, curve, strict=True)),
        _describe_pair(x, y),
        _noise(curve),
    )


def sup_distance_of_trace(
    trace: NDArray[np.float64],
    x: Point | None = None,
    y: Point | None = None,
) -> MeanMetricEstimate:
    """``max_i d(T^i x, T^i y)``, the plain equicontinuity statistic."""
    running = np.maximum.accumulate(trace)
    schedule = geometric_schedule(trace.shape[0])
    return MeanMetricEstimate(
        MetricKind.SUP_DISTANCE,
        float(running[-1]),
        int(trace.shape[0]),
        [(n, float(running[n - 1])) for n in schedule],
        _describe_pair(x, y),
        0.0,
    )


def exceptional_set(trace: NDArray[np.float64], eps: float) -> IndexTrace:
    """The index set ``{i : d(T^i x, T^i y) >= eps}``."""
    return IndexTrace(np.asarray(trace) >= eps)


def exceptional_density_of_trace(
    trace: NDArray[np.float64],
    eps: float,
    x: Point | None = None,
    y: Point | None = None,
) -> MeanMetricEstimate:
    """Upper density of the times the pair is at least ``eps`` apart."""
    exceptional = exceptional_set(trace, eps)
    schedule = geometric_schedule(exceptional.horizon)
    counts = exceptional.counts()
    partials = [counts[n] / n for n in schedule]
    upper = density_estimate(exceptional, schedule).upper
    return MeanMetricEstimate(
        MetricKind.EXCEPTIONAL_DENSITY,
        upper,
        exceptional.horizon,
        list(zip(schedule, partials, strict=True)),
        _describe_pair(x, y),
        _noise(partials),
    )


# Operations on systems.


def dbar_n(sys: System, x: Point, y: Point, n: int) -> float:
    """``(1/n) sum_{i<n} d(T^i x, T^i y)``, correctly rounded."""
    if n < 1:
        msg = f"dbar_n needs n >= 1, got {n}"
        raise HorizonError(msg)
    return exact_mean(sys.distance_trace(x, y, n))


def besicovitch_estimate(
    sys: System, x: Point, y: Point, schedule: Sequence[int]
) -> MeanMetricEstimate:
    """Estimate ``limsup_n dbar_n(x, y)`` as the max over the schedule tail."""
    if not schedule:
        msg = "empty schedule"
        raise EmptyScheduleError(msg)
    trace = sys.distance_trace(x, y, int(schedule[-1]))
    return besicovitch_of_trace(trace, schedule, x, y)


def sup_dbar(sys: System, x: Point, y: Point, N: int) -> MeanMetricEstimate:
    """``max_{1 <= n <= N} dbar_n(x, y)``."""
    return sup_of_trace(sys.distance_trace(x, y, N), x, y)


def weyl_estimate(
    sys: System,
    x: Point,
    y: Point,
    window_lengths: Sequence[int],
    N: int,
) -> MeanMetricEstimate:
    """Estimate the limsup of window-averaged distances."""
    if not window_lengths:
        msg = "empty window lengths"
        raise EmptyScheduleError(msg)
    return weyl_of_trace(sys.distance_trace(x, y, N), window_lengths, x, y)


def sampled_window_lengths(N_min: int, N: int) -> list[int]:
    """``N_min``, ``N`` and a geometric selection of lengths in between."""
    lengths = {N_min, N}
    lengths.update(
        n for n in geometric_schedule(N, 1.25) if N_min <= n <= N
    )
    return sorted(lengths)


def windowed_uniform_bound_of_trace(
    trace: NDArray[np.float64],
    N_min: int,
    N: int,
    sums: NDArray[np.float64] | None = None,
) -> float:
    horizon = trace.shape[0]
    if not 1 <= N_min <= N <= horizon:
        msg = f"need 1 <= N_min={N_min} <= N={N} <= horizon={horizon}"
        raise HorizonError(msg)
    lengths = sampled_window_lengths(N_min, N)
    return float(np.max(window_maxima(trace, lengths, sums)))


def windowed_uniform_bound(
    sys: System,
    x: Point,
    y: Point,
    N_min: int,
    N: int,
    horizon: int,
) -> float:
    """Largest window average over lengths in ``[N_min, N]``, any start.

    Windows must end inside ``[0, horizon)``.
    """
    if not 1 <= N_min <= N <= horizon:
        msg = f"need 1 <= N_min={N_min} <= N={N} <= horizon={horizon}"
        raise HorizonError(msg)
    trace = sys.distance_trace(x, y, horizon)
    return windowed_uniform_bound_of_trace(trace, N_min, N)
