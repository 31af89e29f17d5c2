"""Window statistics, densities and Banach densities of index sets.

Windows follow two conventions: prefix averages divide ``#(F ∩ [0,n-1])``
by ``n``, arbitrary windows divide ``#(F ∩ [m,n])`` by ``n - m + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import NamedTuple
from typing import TYPE_CHECKING

import numpy as np

from meanequi._types import EmptyScheduleError
from meanequi._types import HorizonError
from meanequi._util import dyadic_lengths
from meanequi._util import geometric_schedule
from meanequi._util import tail_half

if TYPE_CHECKING:
    from collections.abc import Iterable
    from collections.abc import Sequence

    from numpy.typing import ArrayLike
    from numpy.typing import NDArray


class Bounds(NamedTuple):
    """A lower and upper estimate."""

    lower: float
    upper: float


@dataclass(frozen=True)
class IndexTrace:
    """The indicator of ``F ∩ [0, N)`` for an index set ``F``."""

    bits: NDArray[np.bool_]

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=np.bool_)
        if bits.ndim != 1 or bits.shape[0] < 1:
            msg = "an index trace needs at least one entry"
            raise HorizonError(msg)
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def horizon(self) -> int:
        return int(self.bits.shape[0])

    @staticmethod
    def from_indices(indices: Iterable[int], horizon: int) -> IndexTrace:
        """The trace of the given indices truncated to ``[0, horizon)``."""
        bits = np.zeros(horizon, dtype=np.bool_)
        index = np.fromiter(indices, dtype=np.int64)
        bits[index[(index >= 0) & (index < horizon)]] = True
        return IndexTrace(bits)

    @staticmethod
    def from_runs(text: str) -> IndexTrace:
        """Parse alternating run lengths, starting with a run of ``False``.

        ``"2 3 1"`` is ``FF TTT F``.
        """
        runs = [int(token) for token in re.split(r"[\s,]+", text.strip())]
        if any(run < 0 for run in runs):
            msg = "run lengths must be non-negative"
            raise ValueError(msg)
        values = np.arange(len(runs)) % 2 == 1
        return IndexTrace(np.repeat(values, runs))

    def to_runs(self) -> str:
        """Alternating run lengths, the first (false) run may be empty."""
        changes = np.flatnonzero(np.diff(self.bits.astype(np.int8))) + 1
        edges = np.concatenate(([0], changes, [self.horizon]))
        runs = np.diff(edges).tolist()
        if self.bits[0]:
            runs.insert(0, 0)
        return " ".join(str(run) for run in runs)

    def counts(self) -> NDArray[np.int64]:
        """Prefix counts with a leading zero (exact integers)."""
        out = np.zeros(self.horizon + 1, dtype=np.int64)
        np.cumsum(self.bits, out=out[1:])
        return out


def window_fraction(trace: IndexTrace, m: int, n: int) -> float:
    """``#(F ∩ [m, n]) / (n - m + 1)`` for ``0 <= m <= n < N``."""
    if not 0 <= m <= n < trace.horizon:
        msg = f"window [{m}, {n}] not inside [0, {trace.horizon})"
        raise HorizonError(msg)
    hits = int(np.count_nonzero(trace.bits[m : n + 1]))
    return hits / (n - m + 1)


def _check_schedule(schedule: Sequence[int], limit: int, what: str) -> None:
    if not schedule:
        msg = f"empty {what}"
        raise EmptyScheduleError(msg)
    if any(b <= a for a, b in zip(schedule, schedule[1:], strict=False)):
        msg = f"{what} must be strictly increasing"
        raise EmptyScheduleError(msg)
    if schedule[0] < 1 or schedule[-1] > limit:
        msg = f"{what} must lie in [1, {limit}]"
        raise HorizonError(msg)


def prefix_fractions(
    trace: IndexTrace, prefix_schedule: Sequence[int]
) -> NDArray[np.float64]:
    """``#(F ∩ [0, n-1]) / n`` for every ``n`` of the schedule."""
    _check_schedule(prefix_schedule, trace.horizon, "prefix schedule")
    lengths = np.asarray(prefix_schedule, dtype=np.int64)
    return trace.counts()[lengths] / lengths


def density_estimate(
    trace: IndexTrace, prefix_schedule: Sequence[int]
) -> Bounds:
    """Estimate lower and upper density.

    The estimates are the min and max of the prefix fractions over the final
    half of the schedule.
    """
    tail = tail_half(prefix_fractions(trace, prefix_schedule).tolist())
    return Bounds(min(tail), max(tail))


def window_extrema(
    values: ArrayLike, length: int, counts: ArrayLike | None = None
) -> Bounds:
    """Min and max of the averages over all windows of ``length`` terms.

    ``counts`` may carry precomputed prefix sums (with a leading zero).
    """
    if counts is None:
        terms = np.asarray(values)
        sums = np.zeros(terms.shape[0] + 1, dtype=np.result_type(terms, 0))
        np.cumsum(terms, out=sums[1:])
    else:
        sums = np.asarray(counts)
    if not 1 <= length < sums.shape[0]:
        msg = f"window length {length} outside [1, {sums.shape[0] - 1}]"
        raise HorizonError(msg)
    windows = sums[length:] - sums[:-length]
    return Bounds(float(windows.min()) / length, float(windows.max()) / length)


def banach_curve(
    trace: IndexTrace, window_lengths: Sequence[int]
) -> list[Bounds]:
    """Min and max window fraction for every window length."""
    _check_schedule(window_lengths, trace.horizon, "window lengths")
    counts = trace.counts()
    return [window_extrema(trace.bits, L, counts) for L in window_lengths]


def banach_density_estimate(
    trace: IndexTrace, window_lengths: Sequence[int]
) -> Bounds:
    """Estimate lower and upper Banach density at the largest window length."""
    return banach_curve(trace, window_lengths)[-1]


def default_window_lengths(horizon: int) -> list[int]:
    """Powers of two up to a quarter of the horizon."""
    return dyadic_lengths(max(1, horizon // 4))


@dataclass(frozen=True)
class DensityEstimate:
    """All four densities of an index set, with their diagnostics.

    The values are clamped so that ``lower_banach <= lower_density <=
    upper_density <= upper_banach`` holds for the reported numbers; the raw
    statistics stay available in ``prefix_partials`` and ``partials``.
    """

    lower_density: float
    upper_density: float
    lower_banach: float
    upper_banach: float
    horizon: int
    prefix_schedule: list[int]
    window_schedule: list[int]
    prefix_partials: list[float] = field(default_factory=list)
    partials: list[Bounds] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "lower_density": self.lower_density,
            "upper_density": self.upper_density,
            "lower_banach": self.lower_banach,
            "upper_banach": self.upper_banach,
            "horizon": self.horizon,
            "prefix_schedule": self.prefix_schedule,
            "window_schedule": self.window_schedule,
            "prefix_partials": self.prefix_partials,
            "partials": [list(p) for p in self.partials],
        }


def estimate_densities(
    trace: IndexTrace,
    prefix_schedule: Sequence[int] | None = None,
    window_lengths: Sequence[int] | None = None,
) -> DensityEstimate:
    """Density and Banach density estimates with default schedules."""
    prefix_schedule = list(
        prefix_schedule or geometric_schedule(trace.horizon)
    )
    window_lengths = list(
        window_lengths or default_window_lengths(trace.horizon)
    )
    fractions = prefix_fractions(trace, prefix_schedule).tolist()
    tail = tail_half(fractions)
    lower, upper = min(tail), max(tail)
    curve = banach_curve(trace, window_lengths)
    lower_banach = min(curve[-1].lower, lower)
    upper_banach = max(curve[-1].upper, upper)
    return DensityEstimate(
        lower_density=lower,
        upper_density=upper,
        lower_banach=lower_banach,
        upper_banach=upper_banach,
        horizon=trace.horizon,
        prefix_schedule=prefix_schedule,
        window_schedule=window_lengths,
        prefix_partials=fractions,
        partials=curve,
    )

