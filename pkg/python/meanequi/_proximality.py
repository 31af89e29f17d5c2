"""Pairwise relation tests: proximal, Banach proximal, regionally proximal
and sensitive in the mean.

A finite search cannot prove that no suitable time exists, so none of the
existential tests ever reports ``Fails``. Certificates attached to catalog
entries add analytic notes (an isometry keeps every pair apart), they never
turn a search result into a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from logging import getLogger
from typing import Any
from typing import TYPE_CHECKING

import numpy as np

from meanequi._densities import default_window_lengths
from meanequi._metrics import exceptional_set
from meanequi._spaces import DoublingMap
from meanequi._spaces import ShiftSystem
from meanequi._spaces import SymbolicPoint
from meanequi._spaces import splice
from meanequi._types import CapabilityError
from meanequi._types import EmptyScheduleError
from meanequi._types import PairOutcome
from meanequi._types import PreconditionError
from meanequi._types import ResolutionError
from meanequi._util import derive_rng

if TYPE_CHECKING:
    from collections.abc import Sequence

    from meanequi._spaces import Point
    from meanequi._spaces import System

logger = getLogger(__name__)

#: Upper Banach density below which an exceptional set counts as null.
BANACH_PROXIMAL_THETA = 0.01

#: Window fraction that every window length must reach to refute.
BANACH_FAIL_FRACTION = 0.1

DEFAULT_EPS_SCHEDULE = tuple(2.0**-k for k in range(2, 11))
C_GRID = (0.5, 0.25, 0.125)


class Relation(str, Enum):
    PROXIMAL = "P"
    BANACH_PROXIMAL = "BP"
    REGIONALLY_PROXIMAL = "Q"
    MEAN_SENSITIVE = "Q_me"


@dataclass(frozen=True)
class PairVerdict:
    """The outcome of one relation test on one pair.

    ``witness`` is JSON-friendly and sufficient to re-check the outcome,
    ``parameters`` records everything the test was called with.
    """

    relation: Relation
    x: Point
    y: Point
    outcome: PairOutcome
    witness: dict[str, Any] = field(default_factory=dict)
    parameters: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.outcome is PairOutcome.HOLDS

    def to_json(self) -> dict[str, Any]:
        return {
            "relation": self.relation.value,
            "pair": [self.x.describe(), self.y.describe()],
            "outcome": self.outcome.value,
            "witness": self.witness,
            "parameters": self.parameters,
            "notes": self.notes,
        }


class Certificate:
    """An analytic bound a catalog entry knows about its system."""

    name = "certificate"

    def regionally_proximal(
        self,
        sys: System,  # noqa: ARG002
        x: Point,  # noqa: ARG002
        y: Point,  # noqa: ARG002
        eps: float,  # noqa: ARG002
    ) -> str | None:
        return None

    def mean_sensitive(
        self,
        sys: System,  # noqa: ARG002
        x: Point,  # noqa: ARG002
        y: Point,  # noqa: ARG002
        tau: float,  # noqa: ARG002
        eps: float,  # noqa: ARG002
    ) -> str | None:
        return None

    def banach_proximal(
        self,
        sys: System,  # noqa: ARG002
        x: Point,  # noqa: ARG002
        y: Point,  # noqa: ARG002
    ) -> str | None:
        return None


class IsometryCertificate(Certificate):
    """``d(T x, T y) = d(x, y)`` for all points."""

    name = "isometry"

    def regionally_proximal(
        self, sys: System, x: Point, y: Point, eps: float
    ) -> str | None:
        distance = sys.metric(x, y)
        if distance > 3 * eps:
            return (
                f"isometry: d(T^n x', T^n y') >= d(x,y) - 2 eps = "
                f"{distance - 2 * eps:.6g} > eps for all n, pair is not "
                "regionally proximal"
            )
        return None

    def mean_sensitive(
        self, sys: System, x: Point, y: Point, tau: float, eps: float
    ) -> str | None:
        distance = sys.metric(x, y)
        if distance >= 2 * tau + eps:
            return (
                f"isometry: tracking x and y within tau={tau:.6g} needs "
                f"d(x', y') > d(x,y) - 2 tau = {distance - 2 * tau:.6g} "
                f">= eps={eps:.6g}, visit frequency is 0"
            )
        return None


class ContractingFixedPointCertificate(Certificate):
    """Every orbit converges to the fixed point ``fixed``."""

    name = "contracting_fixed_point"

    def __init__(self, fixed: Point) -> None:
        self.fixed = fixed

    def banach_proximal(
        self,
        sys: System,  # noqa: ARG002
        x: Point,  # noqa: ARG002
        y: Point,  # noqa: ARG002
    ) -> str | None:
        return (
            "orbits converge to a common fixed point, every exceptional "
            "set {i : d >= eps} is finite"
        )


def _check_eps(eps_list: Sequence[float]) -> list[float]:
    eps = [float(e) for e in eps_list]
    if not eps:
        msg = "empty eps list"
        raise EmptyScheduleError(msg)
    if any(e <= 0 for e in eps) or any(
        b >= a for a, b in zip(eps, eps[1:], strict=False)
    ):
        msg = "eps list must be positive and strictly decreasing"
        raise EmptyScheduleError(msg)
    return eps


def _same(x: Point, y: Point) -> bool:
    return x == y or x.describe() == y.describe()


def proximal_test(
    sys: System,
    x: Point,
    y: Point,
    eps_list: Sequence[float],
    horizon: int,
) -> PairVerdict:
    """Search ``1 <= n <= horizon`` with ``d(T^n x, T^n y) < eps``."""
    eps_list = _check_eps(eps_list)
    parameters = {"eps": eps_list, "horizon": horizon}
    distances = sys.distance_trace(x, y, horizon + 1)[1:]
    times: dict[str, int] = {}
    for eps in eps_list:
        hits = np.flatnonzero(distances < eps)
        if hits.shape[0] == 0:
            return PairVerdict(
                Relation.PROXIMAL,
                x,
                y,
                PairOutcome.INCONCLUSIVE,
                {"min_distance": float(distances.min()), "failed_eps": eps},
                parameters,
            )
        times[repr(eps)] = int(hits[0]) + 1
    return PairVerdict(
        Relation.PROXIMAL,
        x,
        y,
        PairOutcome.HOLDS,
        {"times": times},
        parameters,
    )


def _worst_windows(
    exceptional: Any, window_lengths: Sequence[int]
) -> list[tuple[int, int, float]]:
    counts = exceptional.counts()
    windows = []
    for length in window_lengths:
        totals = counts[length:] - counts[:-length]
        start = int(np.argmax(totals))
        windows.append((start, length, float(totals[start]) / length))
    return windows


def banach_proximal_test(
    sys: System,
    x: Point,
    y: Point,
    eps_list: Sequence[float],
    horizon: int,
    window_lengths: Sequence[int] | None = None,
    theta: float = BANACH_PROXIMAL_THETA,
    certificates: Sequence[Certificate] = (),
) -> PairVerdict:
    """Check that the times the pair is ``eps`` apart have Banach density 0.

    Holds when every upper Banach estimate is at most ``theta``. Fails when
    for some ``eps`` every window length has a window in which at least
    ``BANACH_FAIL_FRACTION`` of the times are exceptional; the windows are
    the witness.
    """
    eps_list = _check_eps(eps_list)
    window_lengths = list(window_lengths or default_window_lengths(horizon))
    parameters = {
        "eps": eps_list,
        "horizon": horizon,
        "window_lengths": window_lengths,
        "theta": theta,
    }
    distances = sys.distance_trace(x, y, horizon)
    uppers: dict[str, float] = {}
    refutation = None
    for eps in eps_list:
        windows = _worst_windows(
            exceptional_set(distances, eps), window_lengths
        )
        uppers[repr(eps)] = windows[-1][2]
        if refutation is None and all(
            w[2] >= BANACH_FAIL_FRACTION for w in windows
        ):
            refutation = {"eps": eps, "windows": [list(w) for w in windows]}
    notes = [
        note
        for cert in certificates
        if (note := cert.banach_proximal(sys, x, y)) is not None
    ]
    if all(value <= theta for value in uppers.values()):
        outcome = PairOutcome.HOLDS
        witness: dict[str, Any] = {"upper_banach": uppers}
    elif refutation is not None:
        outcome = PairOutcome.FAILS
        witness = {"upper_banach": uppers, **refutation}
    else:
        outcome = PairOutcome.INCONCLUSIVE
        witness = {"upper_banach": uppers}
    return PairVerdict(
        Relation.BANACH_PROXIMAL, x, y, outcome, witness, parameters, notes
    )


def shared_tail_pair(
    sys: System,
    x: Point,
    y: Point,
    prefix: int,
    rng: np.random.Generator,
) -> tuple[Point, Point] | None:
    """Points keeping ``prefix`` symbols of x and y, then a common tail.

    Only full shifts (and the doubling map through its binary twin) admit
    this construction; other systems return ``None``.
    """
    if isinstance(sys, DoublingMap):
        x_twin, y_twin = sys.twin(x), sys.twin(y)
    elif isinstance(sys, ShiftSystem) and sys.full:
        x_twin, y_twin = x, y  # type: ignore[assignment]
    else:
        return None
    tail = sys.sample_point(rng)
    if not isinstance(tail, SymbolicPoint):
        return None
    return (
        splice(x_twin.symbols(prefix).tolist(), tail),
        splice(y_twin.symbols(prefix).tolist(), tail),
    )


def _first_close(
    sys: System, a: Point, b: Point, eps: float, budget: int
) -> int | None:
    distances = sys.distance_trace(a, b, budget + 1)[1:]
    hits = np.flatnonzero(distances < eps)
    return int(hits[0]) + 1 if hits.shape[0] else None


def regionally_proximal_test(
    sys: System,
    x: Point,
    y: Point,
    eps: float,
    search_budget: int,
    rng_seed: int = 0,
    certificates: Sequence[Certificate] = (),
) -> PairVerdict:
    """Search ``x'`` near x, ``y'`` near y and ``n`` with close orbits."""
    if not sys.capabilities.can_sample_near:
        msg = f"{sys.id} cannot sample near points"
        raise CapabilityError(msg)
    parameters = {"eps": eps, "search_budget": search_budget, "seed": rng_seed}
    notes = [
        note
        for cert in certificates
        if (note := cert.regionally_proximal(sys, x, y, eps)) is not None
    ]

    def holds(a: Point, b: Point, n: int, how: str) -> PairVerdict:
        witness = {
            "x_prime": a.describe(),
            "y_prime": b.describe(),
            "n": n,
            "construction": how,
        }
        return PairVerdict(
            Relation.REGIONALLY_PROXIMAL,
            x,
            y,
            PairOutcome.HOLDS,
            witness,
            parameters,
            notes,
        )

    if _same(x, y):
        return holds(x, y, 1, "diagonal")
    n = _first_close(sys, x, y, eps, search_budget)
    if n is not None:
        return holds(x, y, n, "pair itself")
    rng = derive_rng(rng_seed, 0x51)
    prefix = math.ceil(math.log2(1.0 / eps)) + 1
    if prefix <= search_budget:
        pair = shared_tail_pair(sys, x, y, prefix, rng)
        if pair is not None:
            a, b = pair
            if sys.metric(x, a) < eps and sys.metric(y, b) < eps:
                return holds(a, b, prefix, "shared tail")
    attempts = min(64, search_budget)
    for _ in range(attempts):
        try:
            a = sys.sample_near(x, eps, rng)
            b = sys.sample_near(y, eps, rng)
        except ResolutionError:
            break
        n = _first_close(sys, a, b, eps, search_budget)
        if n is not None:
            return holds(a, b, n, "sampled")
    return PairVerdict(
        Relation.REGIONALLY_PROXIMAL,
        x,
        y,
        PairOutcome.INCONCLUSIVE,
        {"attempts": attempts},
        parameters,
        notes,
    )


def _best_frequency(
    sys: System,
    x: Point,
    y: Point,
    a: Point,
    b: Point,
    tau: float,
    budget: int,
) -> tuple[int, float]:
    """Best ``(n, frequency)`` for ``n`` in ``[budget // 4, budget]``.

    The frequency counts ``i < n`` with ``T^i a`` within ``tau`` of ``x``
    and ``T^i b`` within ``tau`` of ``y``.
    """
    near_x = sys.distances_to(sys.frame(a, budget), x) < tau
    near_y = sys.distances_to(sys.frame(b, budget), y) < tau
    counts = np.cumsum(near_x & near_y)
    frequency = counts / np.arange(1, budget + 1)
    start = max(1, budget // 4) - 1
    best = start + int(np.argmax(frequency[start:]))
    return best + 1, float(frequency[best])


def mean_sensitive_pair_test(
    sys: System,
    x: Point,
    y: Point,
    tau: float,
    c: float,
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
    search_budget: int = 1024,
    rng_seed: int = 0,
    certificates: Sequence[Certificate] = (),
) -> PairVerdict:
    """Search, for every eps, pairs ``d(x', y') < eps`` tracking ``(x, y)``.

    Holds when every eps of the schedule has a witness whose visit
    frequency exceeds ``c``. The witness also records the largest ``c`` of
    the grid ``1/2, 1/4, 1/8`` that every eps beat.
    """
    if tau <= 0 or not 0 < c < 1:
        msg = "need tau > 0 and 0 < c < 1"
        raise PreconditionError(msg)
    eps_schedule = _check_eps(eps_schedule)
    parameters = {
        "tau": tau,
        "c": c,
        "eps": eps_schedule,
        "search_budget": search_budget,
        "seed": rng_seed,
    }
    if _same(x, y):
        return PairVerdict(
            Relation.MEAN_SENSITIVE,
            x,
            y,
            PairOutcome.HOLDS,
            {"construction": "diagonal"},
            parameters,
        )
    notes = [
        note
        for cert in certificates
        if (note := cert.mean_sensitive(sys, x, y, tau, eps_schedule[-1]))
        is not None
    ]
    rng = derive_rng(rng_seed, 0x0E)
    per_eps: dict[str, dict[str, Any]] = {}
    for eps in eps_schedule:
        best = _search_mean_sensitive(sys, x, y, tau, eps, search_budget, rng)
        per_eps[repr(eps)] = best
    frequencies = [w["frequency"] for w in per_eps.values()]
    worst = min(frequencies)
    beaten = [grid_c for grid_c in C_GRID if worst > grid_c]
    witness = {
        "per_eps": per_eps,
        "best_c": max(beaten) if beaten else None,
        "min_frequency": worst,
    }
    outcome = PairOutcome.HOLDS if worst > c else PairOutcome.INCONCLUSIVE
    return PairVerdict(
        Relation.MEAN_SENSITIVE, x, y, outcome, witness, parameters, notes
    )


def _search_mean_sensitive(
    sys: System,
    x: Point,
    y: Point,
    tau: float,
    eps: float,
    budget: int,
    rng: np.random.Generator,
) -> dict[str, Any]:
    candidates: list[tuple[str, Point, Point]] = []
    prefix = math.floor(math.log2(1.0 / eps)) + 1
    if isinstance(sys, ShiftSystem) and sys.full:
        word = x.symbols(prefix).tolist()  # type: ignore[union-attr]
        candidates.append(
            ("shared prefix", splice(word, x), splice(word, y))  # type: ignore[arg-type]
        )
    if sys.capabilities.can_sample_near:
        for centre in (x, y):
            for _ in range(4):
                try:
                    a = sys.sample_near(centre, max(tau, eps), rng)
                    b = sys.sample_near(a, eps, rng)
                except ResolutionError:
                    break
                candidates.append(("sampled", a, b))
    best: dict[str, Any] = {"frequency": 0.0, "n": None}
    for how, a, b in candidates:
        if sys.metric(a, b) >= eps:
            continue
        n, frequency = _best_frequency(sys, x, y, a, b, tau, budget)
        if frequency > best["frequency"]:
            best = {
                "frequency": frequency,
                "n": n,
                "x_prime": a.describe(),
                "y_prime": b.describe(),
                "construction": how,
            }
    return best
