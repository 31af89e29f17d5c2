"""State spaces, points, orbits and the abstract dynamical system.

A system exposes two views of an orbit: ``iterate``/``step`` work point by
point, while ``frame`` returns a numpy array whose first axis is time. All
traces (distances, observables) are computed from frames.
"""

from __future__ import annotations

import math
import threading
from abc import ABC
from abc import abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from typing import Any
from typing import TYPE_CHECKING

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from meanequi._types import CapabilityError
from meanequi._types import HorizonError
from meanequi._types import MixedSpaceError
from meanequi._types import ResolutionError
from meanequi._types import SpaceKind
from meanequi._util import derive_rng

if TYPE_CHECKING:
    from collections.abc import Callable
    from collections.abc import Mapping
    from collections.abc import Sequence
    from typing import TypeAlias

    from numpy.typing import NDArray


logger = getLogger(__name__)

#: Default cap on memoized symbols per sequence.
DEFAULT_MEMO_CAP = 2**26

#: Number of symbols the symbolic metric looks at.
DEFAULT_DEPTH = 64

#: Sturmian codings switch to exact integer arithmetic beyond this index.
STURMIAN_FLOAT_LIMIT = 10**7

#: Bits used to decode a binary sequence to a float.
_MANTISSA_BITS = 53

_RANDOM_BLOCK = 4096


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus (or of the unit interval), coordinates in [0,1)."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coords:
            msg = "a torus point needs at least one coordinate"
            raise MixedSpaceError(msg)
        for value in self.coords:
            if not 0.0 <= value < 1.0:
                msg = f"torus coordinate {value!r} not in [0,1)"
                raise MixedSpaceError(msg)

    @staticmethod
    def of(*coords: float) -> TorusPoint:
        return TorusPoint(tuple(float(c) for c in coords))

    def describe(self) -> dict[str, Any]:
        return {"kind": "torus", "coords": list(self.coords)}


@dataclass(frozen=True)
class FinitePoint:
    """An element of a finite metric space."""

    id: int
    size: int

    def __post_init__(self) -> None:
        if not 0 <= self.id < self.size:
            msg = f"finite point id {self.id} not below {self.size}"
            raise MixedSpaceError(msg)

    def describe(self) -> dict[str, Any]:
        return {"kind": "finite", "id": self.id, "size": self.size}


class SymbolSequence(ABC):
    """A deterministic one-sided sequence of symbols ``0..alphabet-1``.

    Computed symbols are memoized up to ``memo_cap`` symbols; requests
    beyond the cap are computed afresh from the definition. The memo array
    is replaced (never written to) under a lock, so concurrent readers only
    ever see complete arrays.
    """

    def __init__(
        self, alphabet: int, memo_cap: int = DEFAULT_MEMO_CAP
    ) -> None:
        self.alphabet = alphabet
        self._memo_cap = memo_cap
        self._memo: NDArray[np.int8] = np.zeros(0, dtype=np.int8)
        self._lock = threading.Lock()

    @abstractmethod
    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        """Compute the symbols at indices ``start..stop-1``."""

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        """JSON-friendly description of the sequence."""

    def block(self, start: int, stop: int) -> NDArray[np.int8]:
        """The symbols at indices ``start..stop-1`` (read-only array)."""
        if start < 0 or stop < start:
            msg = f"invalid symbol range [{start}, {stop})"
            raise HorizonError(msg)
        memo = self._memo
        if stop <= memo.shape[0]:
            return memo[start:stop]
        if stop > self._memo_cap:
            return self._generate(start, stop)
        with self._lock:
            memo = self._memo
            if stop > memo.shape[0]:
                target = min(
                    max(stop, 2 * memo.shape[0], 1024), self._memo_cap
                )
                extra = self._generate(memo.shape[0], target)
                memo = np.concatenate((memo, extra.astype(np.int8)))
                memo.flags.writeable = False
                self._memo = memo
        return memo[start:stop]

    def __getitem__(self, index: int) -> int:
        return int(self.block(index, index + 1)[0])


class WordSequence(SymbolSequence):
    """The eventually periodic sequence ``prefix + period + period + ...``."""

    def __init__(
        self,
        prefix: Sequence[int],
        period: Sequence[int],
        alphabet: int = 2,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        super().__init__(alphabet, memo_cap)
        if not period:
            msg = "period must not be empty"
            raise ValueError(msg)
        self.prefix = tuple(int(s) for s in prefix)
        self.period = tuple(int(s) for s in period)
        self._prefix = np.asarray(self.prefix, dtype=np.int8)
        self._period = np.asarray(self.period, dtype=np.int8)

    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        index = np.arange(start, stop, dtype=np.int64)
        head = len(self.prefix)
        out = self._period[np.maximum(index - head, 0) % len(self.period)]
        if head:
            in_head = index < head
            out[in_head] = self._prefix[index[in_head]]
        return out

    def describe(self) -> dict[str, Any]:
        return {
            "type": "word",
            "prefix": list(self.prefix),
            "period": list(self.period),
            "alphabet": self.alphabet,
        }


class RandomSequence(SymbolSequence):
    """Pseudo-random symbols, a pure function of ``(seed, index)``."""

    def __init__(
        self, seed: int, alphabet: int = 2, memo_cap: int = DEFAULT_MEMO_CAP
    ) -> None:
        super().__init__(alphabet, memo_cap)
        self.seed = int(seed)

    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        first = start // _RANDOM_BLOCK
        last = -(-stop // _RANDOM_BLOCK)
        blocks = [
            derive_rng(self.seed, b).integers(
                0, self.alphabet, _RANDOM_BLOCK, dtype=np.int8
            )
            for b in range(first, last)
        ]
        joined = np.concatenate(blocks)
        offset = first * _RANDOM_BLOCK
        return joined[start - offset : stop - offset]

    def describe(self) -> dict[str, Any]:
        return {"type": "random", "seed": self.seed, "alphabet": self.alphabet}


class FunctionSequence(SymbolSequence):
    """Symbols given by a vectorized function of the index array."""

    def __init__(
        self,
        name: str,
        function: Callable[[NDArray[np.int64]], NDArray[Any]],
        alphabet: int = 2,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        super().__init__(alphabet, memo_cap)
        self.name = name
        self._function = function

    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        index = np.arange(start, stop, dtype=np.int64)
        return np.asarray(self._function(index), dtype=np.int8)

    def describe(self) -> dict[str, Any]:
        return {"type": "function", "name": self.name}


class SubstitutionSequence(SymbolSequence):
    """Fixed point of a substitution, e.g. ``{0: (0, 1), 1: (1, 0)}``.

    The image of ``seed_letter`` must start with ``seed_letter`` and be
    longer than one symbol, so that iterating the substitution converges.
    """

    def __init__(
        self,
        name: str,
        rule: Mapping[int, Sequence[int]],
        seed_letter: int = 0,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        super().__init__(len(rule), memo_cap)
        image = rule[seed_letter]
        if len(image) < 2 or image[0] != seed_letter:
            msg = "substitution has no fixed point starting at seed letter"
            raise ValueError(msg)
        self.name = name
        self.rule = {int(k): tuple(int(s) for s in v) for k, v in rule.items()}
        self.seed_letter = seed_letter
        width = max(len(v) for v in self.rule.values())
        self._lengths = np.array(
            [len(self.rule[a]) for a in range(self.alphabet)], dtype=np.int64
        )
        self._table = np.zeros((self.alphabet, width), dtype=np.int8)
        for letter, word in self.rule.items():
            self._table[letter, : len(word)] = word

    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        word = np.array([self.seed_letter], dtype=np.int8)
        columns = np.arange(self._table.shape[1])
        while word.shape[0] < stop:
            images = self._table[word]
            mask = columns[np.newaxis, :] < self._lengths[word][:, np.newaxis]
            word = images[mask]
        return word[start:stop]

    def describe(self) -> dict[str, Any]:
        return {
            "type": "substitution",
            "name": self.name,
            "rule": {str(k): list(v) for k, v in sorted(self.rule.items())},
            "seed_letter": self.seed_letter,
        }


def convergent(quotients: Sequence[int], min_denominator: int) -> Fraction:
    """Convergent of ``[0; q1, q2, ...]`` (last quotient repeating)."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    index = 0
    while q < min_denominator:
        a = quotients[min(index, len(quotients) - 1)]
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        index += 1
    return Fraction(p, q)


class SturmianSequence(SymbolSequence):
    """Coding of the rotation orbit of ``start`` by ``[0,1-α)``, ``[1-α,1)``.

    Symbol ``i`` is ``floor((i+1)α + x) - floor(iα + x)``. Indices beyond
    ``STURMIAN_FLOAT_LIMIT`` are computed with a continued-fraction
    convergent in exact integer arithmetic when ``quotients`` is known.
    """

    def __init__(
        self,
        alpha: float,
        start: float,
        quotients: Sequence[int] | None = None,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        super().__init__(2, memo_cap)
        self.alpha = float(alpha)
        self.start = float(start) % 1.0
        self.quotients = tuple(quotients) if quotients else None

    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        split = min(max(start, STURMIAN_FLOAT_LIMIT), stop)
        parts = []
        if start < split:
            index = np.arange(start, split, dtype=np.float64)
            lower = np.floor(index * self.alpha + self.start)
            upper = np.floor((index + 1.0) * self.alpha + self.start)
            parts.append((upper - lower).astype(np.int8))
        if split < stop:
            parts.append(self._generate_exact(split, stop))
        return np.concatenate(parts) if parts else np.zeros(0, np.int8)

    def _generate_exact(self, start: int, stop: int) -> NDArray[np.int8]:
        if self.quotients is None:
            index = np.arange(start, stop, dtype=np.longdouble)
            alpha = np.longdouble(self.alpha)
            lower = np.floor(index * alpha + self.start)
            upper = np.floor((index + 1) * alpha + self.start)
            return (upper - lower).astype(np.int8)
        ratio = convergent(self.quotients, 2**96)
        p, q = ratio.numerator, ratio.denominator
        offset = math.floor(Fraction(self.start) * q)
        symbols = [
            ((i + 1) * p + offset) // q - (i * p + offset) // q
            for i in range(start, stop)
        ]
        return np.asarray(symbols, dtype=np.int8)

    def describe(self) -> dict[str, Any]:
        return {
            "type": "sturmian",
            "alpha": self.alpha,
            "start": self.start,
            "quotients": list(self.quotients) if self.quotients else None,
        }


@dataclass(frozen=True, eq=False)
class SymbolicPoint:
    """A one-sided sequence viewed from ``offset`` on.

    Shifting only increases ``offset``; the symbols are shared with the
    underlying sequence.
    """

    sequence: SymbolSequence
    offset: int = 0

    def symbols(self, count: int) -> NDArray[np.int8]:
        return self.sequence.block(self.offset, self.offset + count)

    def shifted(self, steps: int = 1) -> SymbolicPoint:
        return SymbolicPoint(self.sequence, self.offset + steps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolicPoint):
            return NotImplemented
        return self.sequence is other.sequence and self.offset == other.offset

    def __hash__(self) -> int:
        return hash((id(self.sequence), self.offset))

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "symbolic",
            "sequence": self.sequence.describe(),
            "offset": self.offset,
        }


class SpliceSequence(SymbolSequence):
    """A finite word followed by the symbols of a point."""

    def __init__(
        self,
        head: Sequence[int],
        tail: SymbolicPoint,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        super().__init__(tail.sequence.alphabet, memo_cap)
        self.head = tuple(int(s) for s in head)
        self.tail = tail
        self._head = np.asarray(self.head, dtype=np.int8)

    def _generate(self, start: int, stop: int) -> NDArray[np.int8]:
        size = len(self.head)
        parts = []
        if start < size:
            parts.append(self._head[start : min(stop, size)])
        if stop > size:
            first = max(start, size) - size + self.tail.offset
            parts.append(
                self.tail.sequence.block(first, stop - size + self.tail.offset)
            )
        return np.concatenate(parts)

    def describe(self) -> dict[str, Any]:
        return {
            "type": "splice",
            "head": list(self.head),
            "tail": self.tail.describe(),
        }


def splice(head: Sequence[int], tail: SymbolicPoint) -> SymbolicPoint:
    """The point ``head`` followed by ``tail``."""
    return SymbolicPoint(SpliceSequence(head, tail, tail.sequence._memo_cap))  # noqa: SLF001


@dataclass(frozen=True)
class ProductPoint:
    """A point of a product system."""

    parts: tuple[Point, ...]

    def describe(self) -> dict[str, Any]:
        return {"kind": "product", "parts": [p.describe() for p in self.parts]}


Point: TypeAlias = TorusPoint | SymbolicPoint | FinitePoint | ProductPoint


def describe(point: Point) -> dict[str, Any]:
    """JSON-friendly descriptor of a point."""
    return point.describe()


def _sequence_from_json(
    data: Mapping[str, Any],
    functions: Mapping[str, Callable[[NDArray[np.int64]], NDArray[Any]]],
    memo_cap: int,
) -> SymbolSequence:
    kind = data["type"]
    if kind == "word":
        return WordSequence(
            data["prefix"], data["period"], data.get("alphabet", 2), memo_cap
        )
    if kind == "random":
        return RandomSequence(data["seed"], data["alphabet"], memo_cap)
    if kind == "sturmian":
        return SturmianSequence(
            data["alpha"], data["start"], data.get("quotients"), memo_cap
        )
    if kind == "substitution":
        rule = {int(k): tuple(v) for k, v in data["rule"].items()}
        return SubstitutionSequence(
            data["name"], rule, data.get("seed_letter", 0), memo_cap
        )
    if kind == "splice":
        tail = point_from_json(data["tail"], functions, memo_cap)
        if not isinstance(tail, SymbolicPoint):
            msg = "splice tail must be symbolic"
            raise MixedSpaceError(msg)
        return SpliceSequence(data["head"], tail, memo_cap)
    if kind == "function" and data["name"] in functions:
        return FunctionSequence(
            data["name"], functions[data["name"]], memo_cap=memo_cap
        )
    msg = f"cannot rebuild symbol sequence {kind!r}"
    raise MixedSpaceError(msg)


def point_from_json(
    data: Mapping[str, Any],
    functions: Mapping[
        str, Callable[[NDArray[np.int64]], NDArray[Any]]
    ] | None = None,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> Point:
    """Rebuild a point from its descriptor.

    Function sequences are looked up by name in ``functions``.
    """
    kind = data.get("kind")
    if kind == "torus":
        return TorusPoint(tuple(float(c) for c in data["coords"]))
    if kind == "finite":
        return FinitePoint(int(data["id"]), int(data["size"]))
    if kind == "product":
        return ProductPoint(
            tuple(
                point_from_json(part, functions, memo_cap)
                for part in data["parts"]
            )
        )
    if kind == "symbolic":
        sequence = _sequence_from_json(
            data["sequence"], functions or {}, memo_cap
        )
        return SymbolicPoint(sequence, int(data["offset"]))
    msg = f"unknown point kind {kind!r}"
    raise MixedSpaceError(msg)


# ---------------------------------------------------------------------------
# Systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Capabilities:
    """What a system supports beyond iteration."""

    can_sample_points: bool = True
    can_sample_near: bool = True
    has_known_classification: bool = False


@dataclass(frozen=True)
class Observable:
    """A continuous real function evaluated on orbit frames.

    ``function`` maps a frame (first axis = time) to one value per time.
    ``bound`` is the sup-norm of the function.
    """

    id: str
    function: Callable[[Any], NDArray[np.float64]]
    bound: float
    description: str = ""

    def __call__(self, frame: Any) -> NDArray[np.float64]:
        return np.asarray(self.function(frame), dtype=np.float64)


@dataclass(frozen=True)
class Orbit:
    """The first ``horizon`` points of the orbit of ``base``."""

    system: System
    base: Point
    horizon: int

    def access(self, index: int) -> Point:
        if not 0 <= index < self.horizon:
            msg = f"orbit index {index} outside [0, {self.horizon})"
            raise HorizonError(msg)
        return self.system.iterate(self.base, index)

    def frame(self) -> Any:
        return self.system.frame(self.base, self.horizon)


class System(ABC):
    """A compact metric space with a continuous self-map.

    Systems are immutable after construction and safe to share between
    threads.
    """

    #: Number of iterations that plain floating point reproduces faithfully.
    trusted_horizon: int | None = None

    def __init__(
        self,
        id: str,  # noqa: A002
        space_kind: SpaceKind,
        diameter_bound: float,
        capabilities: Capabilities | None = None,
    ) -> None:
        self.id = id
        self.space_kind = space_kind
        self.diameter_bound = diameter_bound
        self.capabilities = capabilities or Capabilities()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.id}>"

    @abstractmethod
    def check(self, point: Point) -> None:
        """Raise MixedSpaceError unless the point belongs to this space."""

    @abstractmethod
    def metric(self, p: Point, q: Point) -> float:
        """Distance between two points."""

    @abstractmethod
    def step(self, point: Point) -> Point:
        """Apply the map once."""

    @abstractmethod
    def frame(self, point: Point, n: int) -> Any:
        """The first ``n`` orbit points as an array, time on axis 0."""

    @abstractmethod
    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        """Pointwise distances between two frames of equal length."""

    def distances_to(self, frame: Any, point: Point) -> NDArray[np.float64]:
        """Distance of every orbit point of ``frame`` to ``point``."""
        single = self.frame(point, 1)
        return self.frame_distances(
            frame, np.repeat(single, len(frame), axis=0)
        )

    def iterate(self, point: Point, n: int) -> Point:
        if n < 0:
            msg = f"cannot iterate a negative number of times ({n})"
            raise HorizonError(msg)
        self.check(point)
        for _ in range(n):
            point = self.step(point)
        return point

    def orbit(self, point: Point, horizon: int) -> Orbit:
        self.check(point)
        return Orbit(self, point, horizon)

    def distance_trace(
        self, x: Point, y: Point, n: int
    ) -> NDArray[np.float64]:
        if n < 1:
            msg = f"trace length must be positive, got {n}"
            raise HorizonError(msg)
        self.check(x)
        self.check(y)
        return self.frame_distances(self.frame(x, n), self.frame(y, n))

    def observables(self) -> dict[str, Observable]:
        """The registered continuous functions of this system."""
        return {}

    def evaluate(
        self, observable: Observable, point: Point, n: int
    ) -> NDArray[np.float64]:
        """Values of ``observable`` along the first ``n`` orbit points."""
        self.check(point)
        return observable(self.frame(point, n))

    @property
    def resolution(self) -> float:
        """Smallest radius ``sample_near`` can honour."""
        return 0.0

    def sample_point(self, rng: np.random.Generator) -> Point:
        msg = f"{self.id} cannot sample points"
        raise CapabilityError(msg)

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        msg = f"{self.id} cannot sample near a point"
        raise CapabilityError(msg)


def _arc_distances(
    a: NDArray[np.float64], b: NDArray[np.float64]
) -> NDArray[np.float64]:
    diff = np.abs(a - b)
    return np.max(np.minimum(diff, 1.0 - diff), axis=-1)


def _trig_observables(dim: int) -> dict[str, Observable]:
    observables = {}
    for axis in range(dim):
        observables[f"cos{axis}"] = Observable(
            f"cos{axis}",
            lambda frame, k=axis: np.cos(2 * np.pi * frame[:, k]),
            1.0,
            f"cos(2 pi x_{axis})",
        )
        observables[f"sin{axis}"] = Observable(
            f"sin{axis}",
            lambda frame, k=axis: np.sin(2 * np.pi * frame[:, k]),
            1.0,
            f"sin(2 pi x_{axis})",
        )
    return observables


class TorusSystem(System):
    """Base for maps of the d-torus with the max-of-arc-lengths metric."""

    def __init__(
        self,
        id: str,  # noqa: A002
        dim: int,
        capabilities: Capabilities | None = None,
    ) -> None:
        super().__init__(id, SpaceKind.TORUS, 0.5, capabilities)
        self.dim = dim

    def check(self, point: Point) -> None:
        if not isinstance(point, TorusPoint) or len(point.coords) != self.dim:
            msg = f"{point!r} is not a point of the {self.dim}-torus"
            raise MixedSpaceError(msg)

    def metric(self, p: Point, q: Point) -> float:
        self.check(p)
        self.check(q)
        a = np.asarray(p.coords)  # type: ignore[union-attr]
        b = np.asarray(q.coords)  # type: ignore[union-attr]
        return float(_arc_distances(a, b))

    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        return _arc_distances(a, b)

    def observables(self) -> dict[str, Observable]:
        return _trig_observables(self.dim)

    @property
    def resolution(self) -> float:
        return 2.0**-48

    def sample_point(self, rng: np.random.Generator) -> Point:
        return TorusPoint(tuple(rng.random(self.dim).tolist()))

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        self.check(point)
        if radius < self.resolution:
            msg = f"radius {radius} below torus resolution"
            raise ResolutionError(msg)
        offsets = rng.uniform(-radius, radius, self.dim) * (1 - 2**-20)
        coords = np.mod(np.asarray(point.coords) + offsets, 1.0)  # type: ignore[union-attr]
        return TorusPoint(tuple(float(c) % 1.0 for c in coords))


class Rotation(TorusSystem):
    """The translation ``x -> x + alpha (mod 1)`` of the d-torus.

    Orbits use the closed form ``x + frac(n alpha)`` so that the same
    offset is added to every point; distances are then preserved exactly
    up to one rounding per coordinate.
    """

    def __init__(
        self,
        id: str,  # noqa: A002
        alpha: Sequence[float],
        capabilities: Capabilities | None = None,
    ) -> None:
        super().__init__(id, len(alpha), capabilities)
        self.alpha = np.asarray(alpha, dtype=np.float64)

    def _shifts(self, count: int) -> NDArray[np.float64]:
        steps = np.arange(count, dtype=np.float64)
        return np.mod(np.outer(steps, self.alpha), 1.0)

    def iterate(self, point: Point, n: int) -> Point:
        if n < 0:
            msg = f"cannot iterate a negative number of times ({n})"
            raise HorizonError(msg)
        self.check(point)
        shift = np.mod(n * self.alpha, 1.0)
        coords = np.mod(np.asarray(point.coords) + shift, 1.0)  # type: ignore[union-attr]
        return TorusPoint(tuple(float(c) % 1.0 for c in coords))

    def step(self, point: Point) -> Point:
        return self.iterate(point, 1)

    def frame(self, point: Point, n: int) -> Any:
        self.check(point)
        base = np.asarray(point.coords)  # type: ignore[union-attr]
        return np.mod(base + self._shifts(n), 1.0)


def binary_digits(value: float) -> tuple[int, ...]:
    """The exact (finite) binary expansion of a float in [0,1)."""
    ratio = Fraction(value)
    bits = ratio.denominator.bit_length() - 1
    numerator = ratio.numerator
    return tuple((numerator >> (bits - 1 - k)) & 1 for k in range(bits))


class DoublingMap(TorusSystem):
    """The map ``x -> 2x (mod 1)`` with its exact full-shift twin.

    Points may be floats (TorusPoint) or binary expansions (SymbolicPoint);
    on the latter the map is the shift. Float orbits longer than the
    trusted horizon are replaced by the twin of the float, whose digits are
    exact.
    """

    trusted_horizon = 40

    def __init__(
        self,
        id: str = "doubling",  # noqa: A002
        trusted_horizon: int = 40,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        super().__init__(id, 1)
        self.trusted_horizon = trusted_horizon
        self._memo_cap = memo_cap
        self._weights = 2.0 ** -np.arange(1, _MANTISSA_BITS + 1)

    def check(self, point: Point) -> None:
        if isinstance(point, SymbolicPoint):
            if point.sequence.alphabet != 2:
                msg = "the doubling twin uses binary sequences"
                raise MixedSpaceError(msg)
            return
        super().check(point)

    def twin(self, point: Point) -> SymbolicPoint:
        """The binary expansion of a point."""
        if isinstance(point, SymbolicPoint):
            return point
        self.check(point)
        digits = binary_digits(point.coords[0])  # type: ignore[union-attr]
        return SymbolicPoint(
            WordSequence(digits, (0,), memo_cap=self._memo_cap)
        )

    def rational_twin(self, numerator: int, denominator: int) -> SymbolicPoint:
        """The exact (eventually periodic) binary expansion of a fraction."""
        if not 0 <= numerator < denominator:
            msg = f"{numerator}/{denominator} is not in [0, 1)"
            raise MixedSpaceError(msg)
        digits: list[int] = []
        seen: dict[int, int] = {}
        remainder = numerator
        while remainder not in seen:
            seen[remainder] = len(digits)
            remainder *= 2
            digits.append(remainder // denominator)
            remainder %= denominator
        start = seen[remainder]
        return SymbolicPoint(
            WordSequence(
                digits[:start], digits[start:], memo_cap=self._memo_cap
            )
        )

    def decode(self, point: Point) -> float:
        """The float closest to the point (53 binary digits)."""
        if isinstance(point, SymbolicPoint):
            return float(point.symbols(_MANTISSA_BITS) @ self._weights)
        return point.coords[0]  # type: ignore[union-attr]

    def metric(self, p: Point, q: Point) -> float:
        self.check(p)
        self.check(q)
        diff = abs(self.decode(p) - self.decode(q))
        return min(diff, 1.0 - diff)

    def step(self, point: Point) -> Point:
        self.check(point)
        if isinstance(point, SymbolicPoint):
            return point.shifted()
        return TorusPoint(((2.0 * point.coords[0]) % 1.0,))  # type: ignore[union-attr]

    def frame(self, point: Point, n: int) -> Any:
        self.check(point)
        if isinstance(point, TorusPoint):
            if n <= (self.trusted_horizon or 0):
                values = np.empty(n)
                value = point.coords[0]
                for i in range(n):
                    values[i] = value
                    value = (2.0 * value) % 1.0
                return values[:, np.newaxis]
            logger.debug("doubling orbit of %s uses the symbolic twin", point)
            point = self.twin(point)
        bits = point.symbols(n + _MANTISSA_BITS - 1).astype(np.float64)  # type: ignore[union-attr]
        windows = sliding_window_view(bits, _MANTISSA_BITS)
        return (windows @ self._weights)[:, np.newaxis]

    def sample_point(self, rng: np.random.Generator) -> Point:
        seed = int(rng.integers(0, 2**62))
        return SymbolicPoint(RandomSequence(seed, 2, self._memo_cap))

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        if radius < self.resolution:
            msg = f"radius {radius} below doubling-map resolution"
            raise ResolutionError(msg)
        keep = math.ceil(math.log2(1.0 / radius)) + 1
        head = self.twin(point).symbols(keep).tolist()
        tail = SymbolicPoint(
            RandomSequence(int(rng.integers(0, 2**62)), 2, self._memo_cap)
        )
        return splice(head, tail)


class SquaringMap(System):
    """The map ``x -> x**2`` on ``[0, upper]``, every orbit tends to 0."""

    def __init__(self, id: str = "squaring", upper: float = 0.99) -> None:  # noqa: A002
        super().__init__(id, SpaceKind.INTERVAL, upper)
        if not 0.0 < upper < 1.0:
            msg = "upper end of the squaring domain must lie in (0, 1)"
            raise ValueError(msg)
        self.upper = upper

    def check(self, point: Point) -> None:
        if (
            not isinstance(point, TorusPoint)
            or len(point.coords) != 1
            or point.coords[0] > self.upper
        ):
            msg = f"{point!r} is not a point of [0, {self.upper}]"
            raise MixedSpaceError(msg)

    def metric(self, p: Point, q: Point) -> float:
        self.check(p)
        self.check(q)
        return abs(p.coords[0] - q.coords[0])  # type: ignore[union-attr]

    def step(self, point: Point) -> Point:
        self.check(point)
        return TorusPoint((point.coords[0] ** 2,))  # type: ignore[union-attr]

    def frame(self, point: Point, n: int) -> Any:
        self.check(point)
        values = np.zeros(n)
        value = point.coords[0]  # type: ignore[union-attr]
        for i in range(n):
            if value == 0.0:
                break
            values[i] = value
            value *= value
        return values[:, np.newaxis]

    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        return np.abs(a[:, 0] - b[:, 0])

    def observables(self) -> dict[str, Observable]:
        return {
            "x": Observable("x", lambda frame: frame[:, 0], 1.0, "x"),
            **_trig_observables(1),
        }

    @property
    def resolution(self) -> float:
        return 2.0**-48

    def sample_point(self, rng: np.random.Generator) -> Point:
        return TorusPoint((float(rng.uniform(0.0, self.upper)),))

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        self.check(point)
        if radius < self.resolution:
            msg = f"radius {radius} below interval resolution"
            raise ResolutionError(msg)
        value = point.coords[0] + rng.uniform(-radius, radius) * (1 - 2**-20)  # type: ignore[union-attr]
        return TorusPoint((float(np.clip(value, 0.0, self.upper)),))


# ---------------------------------------------------------------------------
# Symbolic systems
# ---------------------------------------------------------------------------


class SymbolicSampler(ABC):
    """How a shift space produces points and nearby points."""

    @abstractmethod
    def sample_point(self, rng: np.random.Generator) -> SymbolicPoint: ...

    @abstractmethod
    def sample_near(
        self, point: SymbolicPoint, prefix: int, rng: np.random.Generator
    ) -> SymbolicPoint:
        """A point agreeing with ``point`` on at least ``prefix`` symbols."""


class FullShiftSampler(SymbolicSampler):
    """Random sequences; nearby points keep a prefix, then go on at random."""

    def __init__(self, alphabet: int = 2, memo_cap: int = DEFAULT_MEMO_CAP):
        self.alphabet = alphabet
        self.memo_cap = memo_cap

    def _random(self, rng: np.random.Generator) -> SymbolicPoint:
        seed = int(rng.integers(0, 2**62))
        sequence = RandomSequence(seed, self.alphabet, self.memo_cap)
        return SymbolicPoint(sequence)

    def sample_point(self, rng: np.random.Generator) -> SymbolicPoint:
        return self._random(rng)

    def sample_near(
        self, point: SymbolicPoint, prefix: int, rng: np.random.Generator
    ) -> SymbolicPoint:
        return splice(point.symbols(prefix).tolist(), self._random(rng))


class OrbitClosureSampler(SymbolicSampler):
    """Points ``T^m u`` of the orbit of a fixed sequence ``u``.

    Nearby points are found by searching ``u[:search_length]`` for another
    occurrence of the required prefix.
    """

    def __init__(self, sequence: SymbolSequence, search_length: int = 2**20):
        self.sequence = sequence
        self.search_length = search_length
        self._codes: dict[int, NDArray[np.int64]] = {}
        self._lock = threading.Lock()

    def _prefix_codes(self, prefix: int) -> NDArray[np.int64]:
        """Base-``alphabet`` code of the word starting at every position."""
        with self._lock:
            codes = self._codes.get(prefix)
            if codes is None:
                weights = self._weights(prefix)
                symbols = self.sequence.block(0, self.search_length + prefix)
                codes = np.convolve(
                    symbols.astype(np.int64), weights[::-1], mode="valid"
                )[: self.search_length]
                self._codes[prefix] = codes
        return codes

    def _weights(self, prefix: int) -> NDArray[np.int64]:
        return self.sequence.alphabet ** np.arange(prefix, dtype=np.int64)

    def sample_point(self, rng: np.random.Generator) -> SymbolicPoint:
        offset = int(rng.integers(0, self.search_length))
        return SymbolicPoint(self.sequence, offset)

    def sample_near(
        self, point: SymbolicPoint, prefix: int, rng: np.random.Generator
    ) -> SymbolicPoint:
        prefix = min(prefix, 62 // max(1, self.sequence.alphabet.bit_length()))
        word = point.symbols(prefix).astype(np.int64)
        target = int(word @ self._weights(prefix))
        matches = np.flatnonzero(self._prefix_codes(prefix) == target)
        if matches.shape[0] == 0:
            msg = f"no occurrence of a {prefix}-symbol prefix found"
            raise ResolutionError(msg)
        return SymbolicPoint(self.sequence, int(rng.choice(matches)))


class SturmianSampler(SymbolicSampler):
    """Sturmian codings; nearby points perturb the coded rotation point."""

    def __init__(
        self,
        alpha: float,
        quotients: Sequence[int] | None = None,
        memo_cap: int = DEFAULT_MEMO_CAP,
    ) -> None:
        self.alpha = alpha
        self.quotients = quotients
        self.memo_cap = memo_cap

    def coding(self, start: float) -> SymbolicPoint:
        return SymbolicPoint(
            SturmianSequence(self.alpha, start, self.quotients, self.memo_cap)
        )

    def rotation_point(self, point: SymbolicPoint) -> float:
        sequence = point.sequence
        if not isinstance(sequence, SturmianSequence):
            msg = "not a Sturmian coding"
            raise MixedSpaceError(msg)
        return (sequence.start + point.offset * self.alpha) % 1.0

    def sample_point(self, rng: np.random.Generator) -> SymbolicPoint:
        return self.coding(float(rng.random()))

    def sample_near(
        self, point: SymbolicPoint, prefix: int, rng: np.random.Generator
    ) -> SymbolicPoint:
        centre = self.rotation_point(point)
        wanted = point.symbols(prefix)
        spread = 2.0**-prefix
        for _ in range(64):
            start = (centre + rng.uniform(-spread, spread)) % 1.0
            candidate = self.coding(start)
            if np.array_equal(candidate.symbols(prefix), wanted):
                return candidate
            spread /= 2
        msg = f"no Sturmian coding sharing a {prefix}-symbol prefix found"
        raise ResolutionError(msg)


class ShiftSystem(System):
    """A shift space with metric ``2**-k``, k the first differing index.

    The metric inspects ``depth`` symbols; sequences that agree on all of
    them are at distance 0.
    """

    def __init__(
        self,
        id: str,  # noqa: A002
        sampler: SymbolicSampler,
        alphabet: int = 2,
        depth: int = DEFAULT_DEPTH,
        *,
        full: bool = False,
    ) -> None:
        super().__init__(id, SpaceKind.SYMBOLIC, 1.0)
        self.sampler = sampler
        self.alphabet = alphabet
        self.depth = depth
        self.full = full
        self._weights = 2.0 ** -np.arange(1, depth + 1)

    def check(self, point: Point) -> None:
        if (
            not isinstance(point, SymbolicPoint)
            or point.sequence.alphabet > self.alphabet
        ):
            msg = f"{point!r} is not a point of {self.id}"
            raise MixedSpaceError(msg)

    def metric(self, p: Point, q: Point) -> float:
        self.check(p)
        self.check(q)
        a = p.symbols(self.depth)  # type: ignore[union-attr]
        b = q.symbols(self.depth)  # type: ignore[union-attr]
        mismatch = np.flatnonzero(a != b)
        if mismatch.shape[0] == 0:
            return 0.0
        return 2.0 ** -int(mismatch[0])

    def step(self, point: Point) -> Point:
        self.check(point)
        return point.shifted()  # type: ignore[union-attr]

    def iterate(self, point: Point, n: int) -> Point:
        if n < 0:
            msg = f"cannot iterate a negative number of times ({n})"
            raise HorizonError(msg)
        self.check(point)
        return point.shifted(n)  # type: ignore[union-attr]

    def frame(self, point: Point, n: int) -> Any:
        self.check(point)
        symbols = point.symbols(n + self.depth - 1)  # type: ignore[union-attr]
        return sliding_window_view(symbols, self.depth)

    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        count = a.shape[0]
        raw_a = np.concatenate((a[:, 0], a[-1, 1:]))
        raw_b = np.concatenate((b[:, 0], b[-1, 1:]))
        mismatch = np.flatnonzero(raw_a != raw_b)
        index = np.arange(count)
        following = np.searchsorted(mismatch, index)
        sentinel = np.append(mismatch, count + self.depth)
        gap = sentinel[following] - index
        weights = np.exp2(-gap.astype(np.float64))
        return np.where(gap < self.depth, weights, 0.0)

    def distances_to(self, frame: Any, point: Point) -> NDArray[np.float64]:
        self.check(point)
        word = point.symbols(self.depth)  # type: ignore[union-attr]
        mismatch = frame != word[np.newaxis, :]
        first = np.argmax(mismatch, axis=1).astype(np.float64)
        return np.where(mismatch.any(axis=1), np.exp2(-first), 0.0)

    def observables(self) -> dict[str, Observable]:
        scale = 1.0 / max(1, self.alphabet - 1)
        return {
            "x0": Observable(
                "x0",
                lambda frame: frame[:, 0] * scale,
                1.0,
                "first symbol (clopen cylinder indicator)",
            ),
            "prefix": Observable(
                "prefix",
                lambda frame: (frame @ self._weights) * scale,
                1.0,
                "2^-k weighted reading of the prefix",
            ),
        }

    @property
    def resolution(self) -> float:
        return 2.0 ** -(self.depth - 1)

    def sample_point(self, rng: np.random.Generator) -> Point:
        return self.sampler.sample_point(rng)

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        self.check(point)
        if radius < self.resolution:
            msg = f"radius {radius} below 2**-{self.depth - 1}"
            raise ResolutionError(msg)
        prefix = math.floor(math.log2(1.0 / radius)) + 1
        return self.sampler.sample_near(point, prefix, rng)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Finite and product systems
# ---------------------------------------------------------------------------


class FiniteSystem(System):
    """A self-map of ``{0..size-1}`` with an explicit distance matrix."""

    def __init__(
        self,
        id: str,  # noqa: A002
        successor: Sequence[int],
        distances: NDArray[np.float64],
    ) -> None:
        matrix = np.asarray(distances, dtype=np.float64)
        size = len(successor)
        if matrix.shape != (size, size):
            msg = "distance matrix does not match the number of points"
            raise ValueError(msg)
        super().__init__(id, SpaceKind.FINITE, float(matrix.max()))
        self.size = size
        self.successor = np.asarray(successor, dtype=np.int64)
        self.distances = matrix

    def check(self, point: Point) -> None:
        if not isinstance(point, FinitePoint) or point.size != self.size:
            msg = f"{point!r} is not a point of {self.id}"
            raise MixedSpaceError(msg)

    def metric(self, p: Point, q: Point) -> float:
        self.check(p)
        self.check(q)
        return float(self.distances[p.id, q.id])  # type: ignore[union-attr]

    def step(self, point: Point) -> Point:
        self.check(point)
        return FinitePoint(int(self.successor[point.id]), self.size)  # type: ignore[union-attr]

    def frame(self, point: Point, n: int) -> Any:
        self.check(point)
        # Orbits are eventually periodic: walk to the first repeat, then tile.
        first_seen: dict[int, int] = {}
        path: list[int] = []
        current = point.id  # type: ignore[union-attr]
        while current not in first_seen and len(path) < n:
            first_seen[current] = len(path)
            path.append(current)
            current = int(self.successor[current])
        if len(path) >= n:
            return np.asarray(path[:n], dtype=np.int64)
        start = first_seen[current]
        cycle = np.asarray(path[start:], dtype=np.int64)
        index = np.arange(n)
        ids = cycle[np.maximum(index - start, 0) % cycle.shape[0]]
        ids[:start] = path[:start]
        return ids

    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        return self.distances[a, b]

    def observables(self) -> dict[str, Observable]:
        scale = 1.0 / max(1, self.size - 1)
        return {
            "id": Observable(
                "id", lambda frame: frame * scale, 1.0, "normalized id"
            )
        }

    def sample_point(self, rng: np.random.Generator) -> Point:
        return FinitePoint(int(rng.integers(0, self.size)), self.size)

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        self.check(point)
        ball = np.flatnonzero(self.distances[point.id] < radius)  # type: ignore[union-attr]
        return FinitePoint(int(rng.choice(ball)), self.size)


class ProductSystem(System):
    """The product ``T1 x T2 x ...`` with the max metric."""

    def __init__(self, factors: Sequence[System], id: str | None = None):  # noqa: A002
        factors = tuple(factors)
        super().__init__(
            id or "_x_".join(f.id for f in factors),
            SpaceKind.PRODUCT,
            max(f.diameter_bound for f in factors),
            Capabilities(
                can_sample_points=all(
                    f.capabilities.can_sample_points for f in factors
                ),
                can_sample_near=all(
                    f.capabilities.can_sample_near for f in factors
                ),
            ),
        )
        self.factors = factors

    def check(self, point: Point) -> None:
        if not isinstance(point, ProductPoint) or len(point.parts) != len(
            self.factors
        ):
            msg = f"{point!r} is not a point of {self.id}"
            raise MixedSpaceError(msg)
        for factor, part in zip(self.factors, point.parts, strict=True):
            factor.check(part)

    def metric(self, p: Point, q: Point) -> float:
        self.check(p)
        self.check(q)
        return max(
            f.metric(a, b)
            for f, a, b in zip(self.factors, p.parts, q.parts, strict=True)  # type: ignore[union-attr]
        )

    def step(self, point: Point) -> Point:
        self.check(point)
        return ProductPoint(
            tuple(
                f.step(part)
                for f, part in zip(self.factors, point.parts, strict=True)  # type: ignore[union-attr]
            )
        )

    def iterate(self, point: Point, n: int) -> Point:
        self.check(point)
        return ProductPoint(
            tuple(
                f.iterate(part, n)
                for f, part in zip(self.factors, point.parts, strict=True)  # type: ignore[union-attr]
            )
        )

    def frame(self, point: Point, n: int) -> Any:
        self.check(point)
        return tuple(
            f.frame(part, n)
            for f, part in zip(self.factors, point.parts, strict=True)  # type: ignore[union-attr]
        )

    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        rows = [
            f.frame_distances(fa, fb)
            for f, fa, fb in zip(self.factors, a, b, strict=True)
        ]
        return np.max(np.vstack(rows), axis=0)

    def distances_to(self, frame: Any, point: Point) -> NDArray[np.float64]:
        self.check(point)
        rows = [
            f.distances_to(fa, part)
            for f, fa, part in zip(
                self.factors, frame, point.parts, strict=True  # type: ignore[union-attr]
            )
        ]
        return np.max(np.vstack(rows), axis=0)

    def observables(self) -> dict[str, Observable]:
        lifted = {}
        for index, factor in enumerate(self.factors):
            for key, observable in factor.observables().items():
                name = f"{index}:{key}"
                lifted[name] = Observable(
                    name,
                    lambda frame, k=index, o=observable: o(frame[k]),
                    observable.bound,
                    f"{observable.description} on factor {index}",
                )
        return lifted

    @property
    def resolution(self) -> float:
        return max(f.resolution for f in self.factors)

    def sample_point(self, rng: np.random.Generator) -> Point:
        return ProductPoint(tuple(f.sample_point(rng) for f in self.factors))

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        self.check(point)
        return ProductPoint(
            tuple(
                f.sample_near(part, radius, rng)
                for f, part in zip(self.factors, point.parts, strict=True)  # type: ignore[union-attr]
            )
        )


class ScaledSystem(System):
    """The same map with the metric multiplied by ``factor``."""

    def __init__(self, inner: System, factor: float) -> None:
        super().__init__(
            f"{inner.id}*{factor:g}",
            inner.space_kind,
            inner.diameter_bound * factor,
            inner.capabilities,
        )
        self.inner = inner
        self.factor = factor

    def check(self, point: Point) -> None:
        self.inner.check(point)

    def metric(self, p: Point, q: Point) -> float:
        return self.factor * self.inner.metric(p, q)

    def step(self, point: Point) -> Point:
        return self.inner.step(point)

    def iterate(self, point: Point, n: int) -> Point:
        return self.inner.iterate(point, n)

    def frame(self, point: Point, n: int) -> Any:
        return self.inner.frame(point, n)

    def frame_distances(self, a: Any, b: Any) -> NDArray[np.float64]:
        return self.factor * self.inner.frame_distances(a, b)

    def distances_to(self, frame: Any, point: Point) -> NDArray[np.float64]:
        return self.factor * self.inner.distances_to(frame, point)

    def observables(self) -> dict[str, Observable]:
        return self.inner.observables()

    @property
    def resolution(self) -> float:
        return self.factor * self.inner.resolution

    def sample_point(self, rng: np.random.Generator) -> Point:
        return self.inner.sample_point(rng)

    def sample_near(
        self, point: Point, radius: float, rng: np.random.Generator
    ) -> Point:
        return self.inner.sample_near(point, radius / self.factor, rng)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def iterate(sys: System, x: Point, n: int) -> Point:
    """Apply the map of ``sys`` ``n`` times to ``x``."""
    return sys.iterate(x, n)


def orbit_distance_trace(
    sys: System, x: Point, y: Point, n: int
) -> NDArray[np.float64]:
    """``d(T^i x, T^i y)`` for ``0 <= i < n``."""
    return sys.distance_trace(x, y, n)


def hitting_trace(
    sys: System, x: Point, inside: Callable[[Point], bool], n: int
) -> NDArray[np.bool_]:
    """Indicator of ``N(x, U)`` on ``[0, n)`` for the set ``U = inside``.

    If ``inside`` has a ``contains_frame`` method, it is evaluated on the
    whole orbit frame at once.
    """
    if n < 1:
        msg = f"trace length must be positive, got {n}"
        raise HorizonError(msg)
    sys.check(x)
    vectorized = getattr(inside, "contains_frame", None)
    if vectorized is not None:
        return np.asarray(vectorized(sys.frame(x, n)), dtype=np.bool_)
    bits = np.zeros(n, dtype=np.bool_)
    point = x
    for i in range(n):
        bits[i] = bool(inside(point))
        point = sys.step(point)
    return bits


@dataclass(frozen=True)
class CoordinateInterval:
    """The set of points whose first coordinate lies in ``[low, high)``.

    With ``open_low`` the lower end is excluded.
    """

    low: float
    high: float
    open_low: bool = False

    def __call__(self, point: Point) -> bool:
        value = point.coords[0]  # type: ignore[union-attr]
        above = value > self.low if self.open_low else value >= self.low
        return above and value < self.high

    def contains_frame(self, frame: Any) -> NDArray[np.bool_]:
        values = frame[:, 0]
        above = values > self.low if self.open_low else values >= self.low
        return np.asarray(above & (values < self.high))


def pair_near_diagonal(
    sys: System,
    delta: float,
    seed: int,
    adversarial: Sequence[Any] = (),
) -> tuple[Point, Point]:
    """A pair with ``d(x, y) < delta``, a pure function of its arguments.

    Odd seeds try the adversarial generators in turn (falling back to
    random sampling when a generator declines), even seeds sample at random.
    """
    if delta <= 0:
        msg = f"delta must be positive, got {delta}"
        raise ResolutionError(msg)
    if delta < sys.resolution:
        msg = f"delta {delta} below the resolution of {sys.id}"
        raise ResolutionError(msg)
    rng = derive_rng(seed, int(-math.log2(delta) * 1024))
    if adversarial and seed % 2 == 1:
        generator = adversarial[(seed // 2) % len(adversarial)]
        pair = generator(sys, delta, rng)
        if pair is not None:
            return pair  # type: ignore[no-any-return]
    if not (
        sys.capabilities.can_sample_points and sys.capabilities.can_sample_near
    ):
        msg = f"{sys.id} does not support pair sampling"
        raise CapabilityError(msg)
    for _ in range(8):
        x = sys.sample_point(rng)
        y = sys.sample_near(x, delta, rng)
        if sys.metric(x, y) < delta:
            return x, y
    msg = f"could not sample a pair closer than {delta} in {sys.id}"
    raise ResolutionError(msg)
