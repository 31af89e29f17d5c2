"""System-level verdicts through modulus scans, and the cross-checks that
compare verdicts the theory says must agree.

A scan samples pairs closer than every ``delta`` of a grid and computes one
statistic per pair (the Besicovitch estimate for mean equicontinuity, the
sup over all ``n`` for equicontinuity in the mean, ...). For every ``eps``
the largest ``delta`` whose pairs all stay below ``eps`` is the modulus.
``CertifiedAtScale`` only means that every ``eps`` of the grid has such a
``delta`` at the scanned horizon and budget; it is not a proof.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from enum import Enum
from logging import getLogger
from typing import Any
from typing import TYPE_CHECKING

import numpy as np

from meanequi._catalog import CatalogEntry
from meanequi._catalog import sample_points
from meanequi._densities import default_window_lengths
from meanequi._ergodic import UEOutcome
from meanequi._ergodic import unique_ergodicity_check
from meanequi._metrics import besicovitch_of_trace
from meanequi._metrics import exceptional_density_of_trace
from meanequi._metrics import sampled_window_lengths
from meanequi._metrics import sup_distance_of_trace
from meanequi._metrics import sup_of_trace
from meanequi._metrics import weyl_of_trace
from meanequi._metrics import window_maxima
from meanequi._proximality import DEFAULT_EPS_SCHEDULE
from meanequi._proximality import banach_proximal_test
from meanequi._proximality import proximal_test
from meanequi._proximality import regionally_proximal_test
from meanequi._spaces import ProductSystem
from meanequi._spaces import ShiftSystem
from meanequi._spaces import pair_near_diagonal
from meanequi._types import EmptyScheduleError
from meanequi._types import Outcome
from meanequi._types import PairOutcome
from meanequi._types import PreconditionError
from meanequi._types import Property
from meanequi._types import ResolutionError
from meanequi._util import derive_rng
from meanequi._util import geometric_schedule
from meanequi._util import log_timing
from meanequi._util import running_sums
from meanequi._util import tail_half
from meanequi._util import worker_count

if TYPE_CHECKING:
    from collections.abc import Callable
    from collections.abc import Sequence

    from numpy.typing import NDArray

    from meanequi._metrics import MeanMetricEstimate
    from meanequi._proximality import PairVerdict
    from meanequi._spaces import Observable
    from meanequi._spaces import Point
    from meanequi._spaces import System

logger = getLogger(__name__)

DEFAULT_EPS_GRID = tuple(2.0**-k for k in range(1, 7))
DEFAULT_DELTA_GRID = tuple(2.0**-k for k in range(1, 21))


@dataclass(frozen=True)
class CheckConfig:
    """Grids, budgets and tolerances shared by all checkers."""

    eps: tuple[float, ...] = DEFAULT_EPS_GRID
    delta: tuple[float, ...] = DEFAULT_DELTA_GRID
    pairs_per_cell: int = 64
    horizon_numeric: int = 100_000
    horizon_symbolic: int = 1_000_000
    window_lengths: tuple[int, ...] | None = None
    eps_schedule: tuple[float, ...] = DEFAULT_EPS_SCHEDULE
    search_budget: int = 1024
    banach_proximal_theta: float = 0.01
    ue_tail: float = 0.02
    ue_margin: float = 0.2
    seed: int = 0

    def horizon_for(self, sys: System) -> int:
        """Symbolic horizon for shift spaces (and products with one)."""
        if _is_symbolic(sys):
            return self.horizon_symbolic
        return self.horizon_numeric

    def windows_for(self, horizon: int) -> list[int]:
        if self.window_lengths:
            return [L for L in self.window_lengths if L <= horizon]
        return default_window_lengths(horizon)


def _is_symbolic(sys: System) -> bool:
    if isinstance(sys, ShiftSystem):
        return True
    if isinstance(sys, ProductSystem):
        return any(_is_symbolic(f) for f in sys.factors)
    inner = getattr(sys, "inner", None)
    return inner is not None and _is_symbolic(inner)


class CheckStatus(str, Enum):
    CONSISTENT = "Consistent"
    CONTRADICTION = "Contradiction"
    INCONCLUSIVE = "Inconclusive"
    SKIPPED = "Skipped"


@dataclass(frozen=True)
class Refutation:
    """A close pair whose statistic exceeds ``eps`` by the noise margin."""

    x: Point
    y: Point
    distance: float
    delta: float
    estimate: MeanMetricEstimate

    def to_json(self) -> dict[str, Any]:
        return {
            "pair": [self.x.describe(), self.y.describe()],
            "distance": self.distance,
            "delta": self.delta,
            "estimate": self.estimate.to_json(),
        }


@dataclass(frozen=True)
class ModulusCell:
    """The scan result for one ``eps``."""

    eps: float
    found_delta: float | None
    worst_below: float | None
    refutation: Refutation | None = None
    candidate: float | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "eps": self.eps,
            "found_delta": self.found_delta,
            "worst_below": self.worst_below,
            "candidate": self.candidate,
            "refutation": (
                self.refutation.to_json() if self.refutation else None
            ),
        }


@dataclass(frozen=True)
class ModulusScan:
    """All cells of a scan plus its parameters.

    ``worst`` holds, per delta level, the largest statistic among all pairs
    closer than that delta (one row per delta, one column per eps).
    """

    property: Property
    eps_grid: list[float]
    delta_grid: list[float]
    per_eps: list[ModulusCell]
    pair_budget: int
    horizon: int
    worst: list[list[float]] = field(default_factory=list)
    skipped_deltas: list[float] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "property": self.property.value,
            "eps_grid": self.eps_grid,
            "delta_grid": self.delta_grid,
            "per_eps": [cell.to_json() for cell in self.per_eps],
            "pair_budget": self.pair_budget,
            "horizon": self.horizon,
            "worst": self.worst,
            "skipped_deltas": self.skipped_deltas,
        }


@dataclass(frozen=True)
class SystemVerdict:
    property: Property
    outcome: Outcome
    scan: ModulusScan
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "property": self.property.value,
            "outcome": self.outcome.value,
            "scan": self.scan.to_json(),
            "notes": self.notes,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    """The result of comparing verdicts that must agree."""

    check: str
    system: str
    status: CheckStatus
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def contradicts(self) -> bool:
        return self.status is CheckStatus.CONTRADICTION

    def to_json(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "system": self.system,
            "status": self.status.value,
            "details": self.details,
        }


# Modulus scans.


def _check_grid(grid: Sequence[float], name: str) -> list[float]:
    values = [float(v) for v in grid]
    if not values:
        msg = f"empty {name} grid"
        raise EmptyScheduleError(msg)
    if any(v <= 0 for v in values) or any(
        b >= a for a, b in zip(values, values[1:], strict=False)
    ):
        msg = f"{name} grid must be positive and strictly decreasing"
        raise EmptyScheduleError(msg)
    return values


def _statistic(
    prop: Property, window_lengths: Sequence[int]
) -> Callable[..., MeanMetricEstimate]:
    """The statistic of a distance trace (and eps) for a property."""
    if prop is Property.EQUICONTINUOUS:
        return lambda trace, eps, x, y: sup_distance_of_trace(  # noqa: ARG005
            trace, x, y
        )
    if prop is Property.MEAN_EQ:
        return lambda trace, eps, x, y: besicovitch_of_trace(  # noqa: ARG005
            trace, geometric_schedule(trace.shape[0]), x, y
        )
    if prop is Property.EQ_IN_MEAN:
        return lambda trace, eps, x, y: sup_of_trace(trace, x, y)  # noqa: ARG005
    if prop is Property.WEYL_MEAN_EQ:
        return lambda trace, eps, x, y: weyl_of_trace(  # noqa: ARG005
            trace, window_lengths, x, y
        )
    return lambda trace, eps, x, y: exceptional_density_of_trace(
        trace, eps, x, y
    )


@dataclass
class _Worst:
    value: float = -1.0
    estimate: MeanMetricEstimate | None = None
    pair: tuple[Point, Point] | None = None
    distance: float = 0.0


def _scan_level(
    sys: System,
    properties: Sequence[Property],
    eps_grid: Sequence[float],
    delta: float,
    pair_budget: int,
    horizon: int,
    seeds: Sequence[Any],
    rng_seed: int,
    window_lengths: Sequence[int],
) -> dict[Property, list[_Worst]]:
    """Worst statistic per property and eps among the pairs of one level."""
    statistics = {p: _statistic(p, window_lengths) for p in properties}
    worst = {p: [_Worst() for _ in eps_grid] for p in properties}
    for k in range(pair_budget):
        x, y = pair_near_diagonal(
            sys, delta, rng_seed * 1_000_000 + k, seeds
        )
        trace = sys.distance_trace(x, y, horizon)
        for prop in properties:
            per_eps = prop is Property.MEAN_L_STABLE
            shared = None if per_eps else statistics[prop](trace, None, x, y)
            for index, eps in enumerate(eps_grid):
                estimate = (
                    statistics[prop](trace, eps, x, y) if per_eps else shared
                )
                assert estimate is not None  # noqa: S101
                current = worst[prop][index]
                if estimate.value > current.value:
                    worst[prop][index] = _Worst(
                        estimate.value, estimate, (x, y), sys.metric(x, y)
                    )
    return worst


def scan_moduli(
    sys: System,
    properties: Sequence[Property],
    eps_grid: Sequence[float],
    delta_grid: Sequence[float],
    pair_budget: int,
    horizon: int,
    seeds: Sequence[Any] = (),
    rng_seed: int = 0,
    window_lengths: Sequence[int] | None = None,
) -> dict[Property, ModulusScan]:
    """Scan several properties on the same sampled pairs."""
    eps_grid = _check_grid(eps_grid, "eps")
    delta_grid = _check_grid(delta_grid, "delta")
    windows = list(window_lengths or default_window_lengths(horizon))
    usable = [d for d in delta_grid if d >= sys.resolution]
    skipped = [d for d in delta_grid if d < sys.resolution]
    if not usable:
        msg = f"every delta is below the resolution of {sys.id}"
        raise ResolutionError(msg)

    def level(index: int) -> dict[Property, list[_Worst]]:
        return _scan_level(
            sys,
            properties,
            eps_grid,
            usable[index],
            pair_budget,
            horizon,
            seeds,
            int(derive_rng(rng_seed, index).integers(0, 2**31)),
            windows,
        )

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        levels = list(pool.map(level, range(len(usable))))

    scans = {}
    for prop in properties:
        scans[prop] = _assemble(
            prop,
            eps_grid,
            usable,
            [lv[prop] for lv in levels],
            pair_budget,
            horizon,
            skipped,
        )
    return scans


def _assemble(
    prop: Property,
    eps_grid: list[float],
    deltas: list[float],
    levels: list[list[_Worst]],
    pair_budget: int,
    horizon: int,
    skipped: list[float],
) -> ModulusScan:
    # A pair sampled below a small delta is also below every larger delta:
    # accumulate from the smallest delta upwards.
    cumulative = [[0.0] * len(eps_grid) for _ in deltas]
    running = [-1.0] * len(eps_grid)
    for d in reversed(range(len(deltas))):
        for e in range(len(eps_grid)):
            running[e] = max(running[e], levels[d][e].value)
            cumulative[d][e] = running[e]
    cells = []
    for e, eps in enumerate(eps_grid):
        found = next(
            (d for d in range(len(deltas)) if cumulative[d][e] < eps), None
        )
        if found is not None:
            cells.append(
                ModulusCell(eps, deltas[found], cumulative[found][e])
            )
            continue
        smallest = levels[-1][e]
        estimate = smallest.estimate
        refutation = None
        if (
            estimate is not None
            and smallest.pair is not None
            and estimate.value >= eps + 2 * estimate.noise
        ):
            refutation = Refutation(
                smallest.pair[0],
                smallest.pair[1],
                smallest.distance,
                deltas[-1],
                estimate,
            )
        cells.append(ModulusCell(eps, None, None, refutation, smallest.value))
    return ModulusScan(
        prop,
        eps_grid,
        deltas,
        cells,
        pair_budget,
        horizon,
        cumulative,
        skipped,
    )


def scan_modulus(
    sys: System,
    property: Property,  # noqa: A002
    eps_grid: Sequence[float],
    delta_grid: Sequence[float],
    pair_budget: int,
    horizon: int,
    seeds: Sequence[Any] = (),
    rng_seed: int = 0,
    window_lengths: Sequence[int] | None = None,
) -> ModulusScan:
    """Find ``delta(eps)`` for one property, or a refuting pair."""
    return scan_moduli(
        sys,
        [property],
        eps_grid,
        delta_grid,
        pair_budget,
        horizon,
        seeds,
        rng_seed,
        window_lengths,
    )[property]


def scan_outcome(scan: ModulusScan) -> Outcome:
    if any(cell.refutation is not None for cell in scan.per_eps):
        return Outcome.REFUTED
    if all(cell.found_delta is not None for cell in scan.per_eps):
        return Outcome.CERTIFIED
    return Outcome.INCONCLUSIVE


def verdict_of(scan: ModulusScan) -> SystemVerdict:
    outcome = scan_outcome(scan)
    notes = [
        f"horizon {scan.horizon}, {scan.pair_budget} pairs per delta level",
    ]
    if outcome is Outcome.CERTIFIED:
        notes.append("certified at this scale only, not a proof")
    if scan.skipped_deltas:
        notes.append(
            f"{len(scan.skipped_deltas)} delta values below resolution skipped"
        )
    return SystemVerdict(scan.property, outcome, scan, notes)


class ScanCache:
    """Verdicts per (system, property), computed once and shared.

    Asking for a property computes every property requested so far for that
    system in one pass over the sampled pairs.
    """

    def __init__(self, config: CheckConfig) -> None:
        self.config = config
        self._verdicts: dict[tuple[str, Property], SystemVerdict] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def _lock(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())

    def verdicts(
        self, entry: CatalogEntry | System, properties: Sequence[Property]
    ) -> dict[Property, SystemVerdict]:
        sys, seeds = _unpack(entry)
        with self._lock(sys.id):
            missing = [
                p for p in properties if (sys.id, p) not in self._verdicts
            ]
            if missing:
                config = self.config
                horizon = config.horizon_for(sys)
                with log_timing(logger, f"scan {sys.id} {missing}"):
                    scans = scan_moduli(
                        sys,
                        missing,
                        config.eps,
                        config.delta,
                        config.pairs_per_cell,
                        horizon,
                        seeds,
                        config.seed,
                        config.windows_for(horizon),
                    )
                for prop, scan in scans.items():
                    self._verdicts[sys.id, prop] = verdict_of(scan)
            return {p: self._verdicts[sys.id, p] for p in properties}

    def verdict(
        self, entry: CatalogEntry | System, prop: Property
    ) -> SystemVerdict:
        return self.verdicts(entry, [prop])[prop]


def _unpack(entry: CatalogEntry | System) -> tuple[System, Sequence[Any]]:
    if isinstance(entry, CatalogEntry):
        return entry.system, entry.adversarial_seeds
    return entry, ()


def check_property(
    entry: CatalogEntry | System,
    prop: Property,
    config: CheckConfig,
    cache: ScanCache | None = None,
) -> SystemVerdict:
    """The verdict of one property at the configured scale."""
    return (cache or ScanCache(config)).verdict(entry, prop)


# Cross-checks.


def _equivalence(
    name: str,
    entry: CatalogEntry | System,
    left: Property,
    right: Property,
    config: CheckConfig,
    cache: ScanCache | None,
) -> ConsistencyReport:
    cache = cache or ScanCache(config)
    verdicts = cache.verdicts(entry, [left, right])
    a, b = verdicts[left].outcome, verdicts[right].outcome
    if Outcome.INCONCLUSIVE in (a, b):
        status = CheckStatus.INCONCLUSIVE
    elif a is b:
        status = CheckStatus.CONSISTENT
    else:
        status = CheckStatus.CONTRADICTION
    sys, _ = _unpack(entry)
    return ConsistencyReport(
        name,
        sys.id,
        status,
        {left.value: a.value, right.value: b.value},
    )


def check_theorem_3_8(
    entry: CatalogEntry | System,
    config: CheckConfig,
    cache: ScanCache | None = None,
) -> ConsistencyReport:
    """Mean equicontinuity and equicontinuity in the mean agree."""
    return _equivalence(
        "theorem_3_8",
        entry,
        Property.MEAN_EQ,
        Property.EQ_IN_MEAN,
        config,
        cache,
    )


def check_theorem_5_1(
    entry: CatalogEntry | System,
    config: CheckConfig,
    cache: ScanCache | None = None,
) -> ConsistencyReport:
    """Mean equicontinuity and Weyl mean equicontinuity agree."""
    return _equivalence(
        "theorem_5_1",
        entry,
        Property.MEAN_EQ,
        Property.WEYL_MEAN_EQ,
        config,
        cache,
    )


def check_mean_l_stability(
    entry: CatalogEntry | System,
    config: CheckConfig,
    cache: ScanCache | None = None,
) -> ConsistencyReport:
    """Mean-L-stability and mean equicontinuity agree."""
    return _equivalence(
        "mean_l_stability",
        entry,
        Property.MEAN_EQ,
        Property.MEAN_L_STABLE,
        config,
        cache,
    )


def check_product_closure(
    left: CatalogEntry | System,
    right: CatalogEntry | System,
    product: CatalogEntry | System,
    config: CheckConfig,
    cache: ScanCache | None = None,
    prop: Property = Property.MEAN_EQ,
) -> ConsistencyReport:
    """The product is certified iff both factors are, refuted iff one is."""
    cache = cache or ScanCache(config)
    a = cache.verdict(left, prop).outcome
    b = cache.verdict(right, prop).outcome
    p = cache.verdict(product, prop).outcome
    if a is Outcome.CERTIFIED and b is Outcome.CERTIFIED:
        expected: Outcome | None = Outcome.CERTIFIED
    elif Outcome.REFUTED in (a, b):
        expected = Outcome.REFUTED
    else:
        expected = None
    if expected is None or p is Outcome.INCONCLUSIVE:
        status = CheckStatus.INCONCLUSIVE
    elif p is expected:
        status = CheckStatus.CONSISTENT
    else:
        status = CheckStatus.CONTRADICTION
    return ConsistencyReport(
        "product_closure",
        product.id,
        status,
        {
            "property": prop.value,
            "factors": {left.id: a.value, right.id: b.value},
            "product": p.value,
        },
    )


def _pairs(
    entry: CatalogEntry | System,
    delta: float,
    count: int,
    seed: int,
) -> list[tuple[Point, Point]]:
    sys, seeds = _unpack(entry)
    return [
        pair_near_diagonal(sys, delta, seed * 1_000_000 + k, seeds)
        for k in range(count)
    ]


def check_theorem_5_3(
    entry: CatalogEntry | System,
    config: CheckConfig,
    cache: ScanCache | None = None,
    horizon: int | None = None,
) -> ConsistencyReport:
    """Find ``(delta, N)`` per eps bounding every window of length >= N.

    Window averages over ``[j, j + n)`` are bounded for all starts ``j`` and
    all sampled lengths ``n >= N`` inside the horizon.
    """
    cache = cache or ScanCache(config)
    sys, _ = _unpack(entry)
    if cache.verdict(entry, Property.MEAN_EQ).outcome is not Outcome.CERTIFIED:
        msg = f"{sys.id} is not certified mean equicontinuous"
        raise PreconditionError(msg)
    horizon = horizon or min(config.horizon_for(sys), 100_000)
    lengths = sampled_window_lengths(1, max(1, horizon // 2))
    budget = max(1, config.pairs_per_cell // 4)
    deltas = [d for d in config.delta if d >= sys.resolution]
    # suffix[d][k]: worst average over windows of length >= lengths[k]
    # among pairs closer than deltas[d].
    suffix = np.zeros((len(deltas), len(lengths)))
    for d, delta in enumerate(deltas):
        worst = np.zeros(len(lengths))
        for x, y in _pairs(entry, delta, budget, config.seed + d):
            trace = sys.distance_trace(x, y, horizon)
            maxima = window_maxima(trace, lengths, running_sums(trace))
            suffix_max = np.maximum.accumulate(maxima[::-1])[::-1]
            worst = np.maximum(worst, suffix_max)
        suffix[d] = worst
    suffix = np.maximum.accumulate(suffix[::-1], axis=0)[::-1]
    found: dict[str, Any] = {}
    missing = []
    for eps in config.eps:
        hit = None
        for d, delta in enumerate(deltas):
            below = np.flatnonzero(suffix[d] < eps)
            if below.shape[0]:
                k = int(below[0])
                hit = {
                    "delta": delta,
                    "N": lengths[k],
                    "bound": float(suffix[d][k]),
                }
                break
        if hit is None:
            missing.append(eps)
        found[repr(eps)] = hit
    status = CheckStatus.INCONCLUSIVE if missing else CheckStatus.CONSISTENT
    return ConsistencyReport(
        "theorem_5_3",
        sys.id,
        status,
        {"horizon": horizon, "per_eps": found, "lengths": lengths},
    )


@dataclass(frozen=True)
class ConvergenceDiagnostic:
    """``f_n(x) - f_n(y)`` along a schedule and the spread of its tail."""

    schedule: list[int]
    values: list[float]
    spread: float

    def to_json(self) -> dict[str, Any]:
        return {
            "schedule": self.schedule,
            "values": self.values,
            "spread": self.spread,
        }


def _averaged_difference(
    sys: System, f: Observable, x: Point, y: Point, horizon: int
) -> NDArray[np.float64]:
    """``f_n(x) - f_n(y)`` for ``1 <= n <= horizon``."""
    diff = sys.evaluate(f, x, horizon) - sys.evaluate(f, y, horizon)
    return running_sums(diff)[1:] / np.arange(1, horizon + 1)


def averaged_function_convergence(
    sys: System,
    f: Observable,
    x: Point,
    y: Point,
    schedule: Sequence[int],
) -> ConvergenceDiagnostic:
    """How far ``f_n(x) - f_n(y)`` still moves over the schedule tail."""
    if not schedule:
        msg = "empty schedule"
        raise EmptyScheduleError(msg)
    averaged = _averaged_difference(sys, f, x, y, schedule[-1])
    values = [float(averaged[n - 1]) for n in schedule]
    tail = tail_half(values)
    return ConvergenceDiagnostic(list(schedule), values, max(tail) - min(tail))


def averaged_function_equicontinuity(
    entry: CatalogEntry | System,
    f: Observable,
    eps: float,
    horizon: int,
    config: CheckConfig,
    cache: ScanCache | None = None,
) -> ConsistencyReport:
    """Estimate a modulus of ``f_n`` that is uniform over ``n <= horizon``.

    For systems certified equicontinuous in the mean a uniform modulus must
    exist; a close pair whose averages differ by ``eps`` plus the noise
    margin is then a contradiction.
    """
    cache = cache or ScanCache(config)
    sys, _ = _unpack(entry)
    budget = max(1, config.pairs_per_cell // 4)
    deltas = [d for d in config.delta if d >= sys.resolution]
    worst_per_delta = []
    worst_pair = None
    for d, delta in enumerate(deltas):
        worst = 0.0
        for x, y in _pairs(entry, delta, budget, config.seed + d):
            averaged = _averaged_difference(sys, f, x, y, horizon)
            gap = float(np.max(np.abs(averaged)))
            if gap > worst:
                worst = gap
                if d == len(deltas) - 1:
                    worst_pair = (x, y)
        worst_per_delta.append(worst)
    cumulative = np.maximum.accumulate(worst_per_delta[::-1])[::-1].tolist()
    found = next(
        (deltas[d] for d in range(len(deltas)) if cumulative[d] < eps), None
    )
    details: dict[str, Any] = {
        "f": f.id,
        "eps": eps,
        "horizon": horizon,
        "deltas": deltas,
        "worst": cumulative,
        "found_delta": found,
        "uniform": found is not None,
    }
    schedule = geometric_schedule(horizon)
    margin_broken = False
    if worst_pair is not None:
        diagnostic = averaged_function_convergence(
            sys, f, worst_pair[0], worst_pair[1], schedule
        )
        details["convergence"] = diagnostic.to_json()
        margin_broken = cumulative[-1] >= eps + 2 * diagnostic.spread
    eq_in_mean = cache.verdict(entry, Property.EQ_IN_MEAN).outcome
    details["eq_in_mean"] = eq_in_mean.value
    if eq_in_mean is Outcome.CERTIFIED:
        if found is not None:
            status = CheckStatus.CONSISTENT
        elif margin_broken:
            status = CheckStatus.CONTRADICTION
        else:
            status = CheckStatus.INCONCLUSIVE
    elif eq_in_mean is Outcome.REFUTED and found is None:
        status = CheckStatus.CONSISTENT
    else:
        status = CheckStatus.INCONCLUSIVE
    return ConsistencyReport(
        "averaged_function_equicontinuity", sys.id, status, details
    )


def check_relation_collapse(
    entry: CatalogEntry,
    config: CheckConfig,
    cache: ScanCache | None = None,
    pairs: int = 8,
    horizon: int | None = None,
    verdicts: list[PairVerdict] | None = None,
) -> ConsistencyReport:
    """Compare the P, BP and Q tests on sampled pairs.

    At equal parameters ``BP Holds => P Holds => Q Holds``; a violation is a
    contradiction. On mean equicontinuous systems the three relations
    coincide; pairs that pass Q at the finite scale but fail BP are counted
    as discrepancies, which a single resolution cannot settle.
    The pair verdicts are appended to ``verdicts`` when it is given.
    """
    cache = cache or ScanCache(config)
    sys = entry.system
    horizon = horizon or min(config.horizon_for(sys), 10_000)
    eps_list = [e for e in config.eps if e < sys.diameter_bound] or [
        sys.diameter_bound / 2
    ]
    rng = derive_rng(config.seed, 0xC0)
    rows = []
    violations = 0
    discrepancies = 0
    for _ in range(pairs):
        x, y = sys.sample_point(rng), sys.sample_point(rng)
        bp = banach_proximal_test(
            sys,
            x,
            y,
            eps_list,
            horizon,
            theta=config.banach_proximal_theta,
            certificates=entry.certificates,
        )
        p = proximal_test(sys, x, y, eps_list, horizon)
        q = regionally_proximal_test(
            sys,
            x,
            y,
            eps_list[-1],
            horizon,
            config.seed,
            entry.certificates,
        )
        if verdicts is not None:
            verdicts.extend((bp, p, q))
        if (bp.holds and not p.holds) or (p.holds and not q.holds):
            violations += 1
        if q.holds and bp.outcome is PairOutcome.FAILS:
            discrepancies += 1
        rows.append(
            {
                "pair": [x.describe(), y.describe()],
                "BP": bp.outcome.value,
                "P": p.outcome.value,
                "Q": q.outcome.value,
            }
        )
    mean_eq = cache.verdict(entry, Property.MEAN_EQ).outcome
    if violations:
        status = CheckStatus.CONTRADICTION
    elif mean_eq is Outcome.CERTIFIED and discrepancies == 0:
        status = CheckStatus.CONSISTENT
    else:
        status = CheckStatus.INCONCLUSIVE
    return ConsistencyReport(
        "relation_collapse",
        sys.id,
        status,
        {
            "mean_eq": mean_eq.value,
            "rows": rows,
            "containment_violations": violations,
            "discrepancies": discrepancies,
        },
    )


def check_theorem_3_6(
    entry: CatalogEntry,
    config: CheckConfig,
    cache: ScanCache | None = None,
    horizon: int | None = None,
) -> ConsistencyReport:
    """Transitive mean equicontinuous systems are uniquely ergodic."""
    cache = cache or ScanCache(config)
    sys = entry.system
    mean_eq = cache.verdict(entry, Property.MEAN_EQ).outcome
    if not entry.flags.transitive or mean_eq is not Outcome.CERTIFIED:
        return ConsistencyReport(
            "theorem_3_6",
            sys.id,
            CheckStatus.SKIPPED,
            {"mean_eq": mean_eq.value, "transitive": entry.flags.transitive},
        )
    horizon = horizon or config.horizon_numeric
    report = unique_ergodicity_check(
        sys,
        list(sys.observables().values()),
        sample_points(entry, 8, config.seed),
        geometric_schedule(horizon),
        config.ue_tail,
        config.ue_margin,
    )
    status = {
        UEOutcome.CONSISTENT: CheckStatus.CONSISTENT,
        UEOutcome.REFUTED: CheckStatus.CONTRADICTION,
        UEOutcome.INCONCLUSIVE: CheckStatus.INCONCLUSIVE,
    }[report.outcome]
    return ConsistencyReport(
        "theorem_3_6",
        sys.id,
        status,
        {"mean_eq": mean_eq.value, "unique_ergodicity": report.to_json()},
    )


def check_weakly_mixing_fixed_point(
    entry: CatalogEntry,
    config: CheckConfig,
    cache: ScanCache | None = None,
    horizon: int = 10_000,
    tolerance: float = 1e-6,
) -> ConsistencyReport:
    """Weakly mixing mean equicontinuous systems have a fixed point as
    unique minimal set: all sampled orbits end up at one fixed point."""
    sys = entry.system
    if not entry.flags.weakly_mixing:
        return ConsistencyReport(
            "weakly_mixing_fixed_point",
            sys.id,
            CheckStatus.SKIPPED,
            {"reason": "not flagged weakly mixing"},
        )
    cache = cache or ScanCache(config)
    mean_eq = cache.verdict(entry, Property.MEAN_EQ).outcome
    if mean_eq is not Outcome.CERTIFIED:
        return ConsistencyReport(
            "weakly_mixing_fixed_point",
            sys.id,
            CheckStatus.SKIPPED,
            {"mean_eq": mean_eq.value},
        )
    starts = sample_points(entry, 8, config.seed)
    ends = [sys.iterate(x, horizon) for x in starts]
    moving = max(sys.metric(p, sys.step(p)) for p in ends)
    apart = max(sys.metric(ends[0], p) for p in ends)
    status = (
        CheckStatus.CONSISTENT
        if max(moving, apart) <= tolerance
        else CheckStatus.CONTRADICTION
    )
    return ConsistencyReport(
        "weakly_mixing_fixed_point",
        sys.id,
        status,
        {"step_distance": moving, "spread": apart, "horizon": horizon},
    )


def with_seed(config: CheckConfig, seed: int) -> CheckConfig:
    return replace(config, seed=seed)
