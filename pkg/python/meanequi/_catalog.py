"""The catalog of classified example systems.

Expected classifications are metadata for the acceptance suites and the
reports; the estimators never read them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import fields
from typing import Any
from typing import TYPE_CHECKING

import numpy as np

from meanequi._proximality import ContractingFixedPointCertificate
from meanequi._proximality import IsometryCertificate
from meanequi._spaces import DEFAULT_DEPTH
from meanequi._spaces import DEFAULT_MEMO_CAP
from meanequi._spaces import DoublingMap
from meanequi._spaces import FiniteSystem
from meanequi._spaces import FullShiftSampler
from meanequi._spaces import FunctionSequence
from meanequi._spaces import OrbitClosureSampler
from meanequi._spaces import ProductPoint
from meanequi._spaces import ProductSystem
from meanequi._spaces import Rotation
from meanequi._spaces import ShiftSystem
from meanequi._spaces import SquaringMap
from meanequi._spaces import SturmianSampler
from meanequi._spaces import SubstitutionSequence
from meanequi._spaces import SymbolicPoint
from meanequi._spaces import TorusPoint
from meanequi._spaces import WordSequence
from meanequi._spaces import convergent
from meanequi._spaces import pair_near_diagonal
from meanequi._types import ConfigError
from meanequi._types import Expectation
from meanequi._types import Property
from meanequi._util import derive_rng

if TYPE_CHECKING:
    from collections.abc import Callable
    from collections.abc import Sequence

    from numpy.typing import NDArray

    from meanequi._proximality import Certificate
    from meanequi._spaces import Point
    from meanequi._spaces import System

    PairSeed = Callable[
        [System, float, np.random.Generator], tuple[Point, Point] | None
    ]

GOLDEN = (math.sqrt(5) - 1) / 2
SILVER = math.sqrt(2) - 1

THUE_MORSE_RULE = {0: (0, 1), 1: (1, 0)}

#: Shifts ``j * 2**s`` with ``u_j = 0``: they keep the first ``2**s``
#: symbols of the Thue-Morse sequence.
_THUE_MORSE_SHIFTS = (3, 5, 6, 9)

ESTABLISHED = "established"
EXTERNAL_LITERATURE = "external literature"


@dataclass(frozen=True)
class Flags:
    transitive: bool = False
    minimal: bool = False
    weakly_mixing: bool = False
    uniquely_ergodic: bool = False
    isometry: bool = False

    @staticmethod
    def names() -> list[str]:
        return [f.name for f in fields(Flags)]

    def enabled(self) -> list[str]:
        return [name for name in self.names() if getattr(self, name)]


@dataclass(frozen=True)
class CatalogOptions:
    """Knobs of the built-in systems."""

    squaring_upper: float = 0.99
    symbol_memo_cap: int = DEFAULT_MEMO_CAP
    symbolic_depth: int = DEFAULT_DEPTH
    sturmian_alpha: float = GOLDEN
    sturmian_quotients: tuple[int, ...] = (1,)
    trusted_horizon: int = 40


@dataclass(frozen=True)
class CatalogEntry:
    """A system together with what is known about it."""

    system: System
    expected: dict[Property, Expectation]
    flags: Flags
    adversarial_seeds: tuple[PairSeed, ...] = ()
    certificates: tuple[Certificate, ...] = ()
    reference_points: tuple[Point, ...] = ()
    expectation_source: str = ESTABLISHED
    notes: str = ""
    factors: tuple[str, ...] = ()

    @property
    def id(self) -> str:
        return self.system.id

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "space": self.system.space_kind.value,
            "expected": {
                p.value: e.value for p, e in sorted(self.expected.items())
            },
            "flags": self.flags.enabled(),
            "expectation_source": self.expectation_source,
            "certificates": [c.name for c in self.certificates],
            "notes": self.notes,
        }


def _expect(
    equicontinuous: bool, mean_eq: bool  # noqa: FBT001
) -> dict[Property, Expectation]:
    def value(flag: bool) -> Expectation:  # noqa: FBT001
        return Expectation.TRUE if flag else Expectation.FALSE

    return {
        Property.EQUICONTINUOUS: value(equicontinuous),
        Property.MEAN_EQ: value(mean_eq),
        Property.EQ_IN_MEAN: value(mean_eq),
        Property.WEYL_MEAN_EQ: value(mean_eq),
        Property.MEAN_L_STABLE: value(mean_eq),
    }


# Points and adversarial pair generators.


def constant_point(
    symbol: int, memo_cap: int = DEFAULT_MEMO_CAP
) -> SymbolicPoint:
    """The sequence ``symbol symbol symbol ...``."""
    return SymbolicPoint(WordSequence((), (symbol,), memo_cap=memo_cap))


def prefix_point(
    k: int, head: int = 0, tail: int = 1, memo_cap: int = DEFAULT_MEMO_CAP
) -> SymbolicPoint:
    """The sequence ``head^k tail tail ...``."""
    return SymbolicPoint(WordSequence((head,) * k, (tail,), memo_cap=memo_cap))


def _block_doubling_symbols(index: NDArray[np.int64]) -> NDArray[np.int64]:
    # Block k is 0^(2^k) 1^(2^k) and starts at 2^(k+1) - 2.
    _, exponent = np.frexp((index + 2).astype(np.float64))
    k = exponent.astype(np.int64) - 2
    position = index + 2 - 2 ** (k + 1)
    return (position >= 2**k).astype(np.int64)


def block_doubling_point(memo_cap: int = DEFAULT_MEMO_CAP) -> SymbolicPoint:
    """``0 1 00 11 0000 1111 ...``, blocks doubling in length."""
    return SymbolicPoint(
        FunctionSequence(
            "block_doubling", _block_doubling_symbols, 2, memo_cap
        )
    )


#: Function sequences used by catalog points, by name.
SEQUENCE_FUNCTIONS = {"block_doubling": _block_doubling_symbols}


def _needed_prefix(delta: float) -> int:
    return math.floor(math.log2(1.0 / delta)) + 1


def prefix_family_seed(
    sys: System, delta: float, rng: np.random.Generator
) -> tuple[Point, Point] | None:
    """``(0^inf, 0^k 1^inf)`` with ``2**-k < delta``."""
    k = _needed_prefix(delta) + int(rng.integers(0, 4))
    if isinstance(sys, ShiftSystem) and k >= sys.depth:
        return None
    return constant_point(0), prefix_point(k)


def thue_morse_seed(
    sequence: SubstitutionSequence,
) -> PairSeed:
    """Pairs ``(T^m u, T^(m + j 2^s) u)`` sharing ``2**s`` symbols."""

    def seed(
        sys: System,  # noqa: ARG001
        delta: float,
        rng: np.random.Generator,
    ) -> tuple[Point, Point] | None:
        s = max(0, math.ceil(math.log2(_needed_prefix(delta))))
        j = _THUE_MORSE_SHIFTS[int(rng.integers(0, len(_THUE_MORSE_SHIFTS)))]
        m = int(rng.integers(0, 64)) * 2 ** (s + 4)
        return (
            SymbolicPoint(sequence, m),
            SymbolicPoint(sequence, m + j * 2**s),
        )

    return seed


def lifted_seed(
    factors: Sequence[System], index: int, seed: PairSeed
) -> PairSeed:
    """Run a factor seed on one coordinate, keep the others equal."""

    def lifted(
        sys: System,  # noqa: ARG001
        delta: float,
        rng: np.random.Generator,
    ) -> tuple[Point, Point] | None:
        pair = seed(factors[index], delta, rng)
        if pair is None:
            return None
        xs: list[Point] = []
        ys: list[Point] = []
        for position, factor in enumerate(factors):
            if position == index:
                xs.append(pair[0])
                ys.append(pair[1])
            else:
                point = factor.sample_point(rng)
                xs.append(point)
                ys.append(point)
        return ProductPoint(tuple(xs)), ProductPoint(tuple(ys))

    return lifted


# Catalog construction.


def _product(
    entries: dict[str, CatalogEntry],
    left: str,
    right: str,
    expected: dict[Property, Expectation],
    flags: Flags,
    **extra: Any,
) -> CatalogEntry:
    a, b = entries[left], entries[right]
    system = ProductSystem((a.system, b.system), f"{left}_x_{right}")
    seeds = [
        lifted_seed(system.factors, index, seed)
        for index, entry in enumerate((a, b))
        for seed in entry.adversarial_seeds
    ]
    return CatalogEntry(
        system,
        expected,
        flags,
        tuple(seeds),
        factors=(left, right),
        **extra,
    )


def build_catalog(options: CatalogOptions | None = None) -> list[CatalogEntry]:
    """Construct the built-in catalog."""
    options = options or CatalogOptions()
    if not 0.0 < options.squaring_upper < 1.0:
        raise ConfigError(
            "catalog.squaring_upper", "must lie strictly between 0 and 1"
        )
    if options.symbol_memo_cap < 1024:
        raise ConfigError("symbol_memo_cap", "must be at least 1024")
    if not 0.0 < options.sturmian_alpha < 1.0:
        raise ConfigError(
            "catalog.sturmian_alpha", "must lie strictly between 0 and 1"
        )
    expansion = float(convergent(options.sturmian_quotients, 2**64))
    if abs(expansion - options.sturmian_alpha) > 1e-12:
        raise ConfigError(
            "catalog.sturmian_quotients",
            f"expand to {expansion!r}, not to sturmian_alpha",
        )
    cap = options.symbol_memo_cap
    depth = options.symbolic_depth
    isometry = (IsometryCertificate(),)
    entries: dict[str, CatalogEntry] = {}

    def add(entry: CatalogEntry) -> None:
        entries[entry.id] = entry

    add(
        CatalogEntry(
            Rotation("rotation", (GOLDEN,)),
            _expect(equicontinuous=True, mean_eq=True),
            Flags(
                transitive=True,
                minimal=True,
                uniquely_ergodic=True,
                isometry=True,
            ),
            certificates=isometry,
            notes="x -> x + (sqrt(5)-1)/2 mod 1",
        )
    )
    add(
        CatalogEntry(
            Rotation("rotation_rational", (1 / 3,)),
            _expect(equicontinuous=True, mean_eq=True),
            Flags(isometry=True),
            certificates=isometry,
            notes="x -> x + 1/3 mod 1, every orbit is periodic",
        )
    )
    doubling = DoublingMap("doubling", options.trusted_horizon, cap)
    add(
        CatalogEntry(
            doubling,
            _expect(equicontinuous=False, mean_eq=False),
            Flags(transitive=True),
            (prefix_family_seed,),
            reference_points=(
                TorusPoint((0.0,)),
                doubling.rational_twin(3, 10),
            ),
            notes=(
                "x -> 2x mod 1, exact binary twin beyond the trusted horizon"
            ),
        )
    )
    add(
        CatalogEntry(
            ShiftSystem(
                "full_shift", FullShiftSampler(2, cap), 2, depth, full=True
            ),
            _expect(equicontinuous=False, mean_eq=False),
            Flags(transitive=True),
            (prefix_family_seed,),
            notes="full shift on {0,1}",
        )
    )
    sturmian = SturmianSampler(
        options.sturmian_alpha, options.sturmian_quotients, cap
    )
    add(
        CatalogEntry(
            ShiftSystem("sturmian", sturmian, 2, depth),
            _expect(equicontinuous=False, mean_eq=True),
            Flags(transitive=True, minimal=True, uniquely_ergodic=True),
            notes=(
                f"coding of the rotation by {options.sturmian_alpha:.12g} "
                "with [0,1-alpha), [1-alpha,1)"
            ),
        )
    )
    thue_morse = SubstitutionSequence(
        "thue_morse", THUE_MORSE_RULE, memo_cap=cap
    )
    add(
        CatalogEntry(
            ShiftSystem(
                "thue_morse", OrbitClosureSampler(thue_morse), 2, depth
            ),
            _expect(equicontinuous=False, mean_eq=False),
            Flags(transitive=True, minimal=True, uniquely_ergodic=True),
            (thue_morse_seed(thue_morse),),
            expectation_source=EXTERNAL_LITERATURE,
            notes="orbit closure of the Prouhet-Thue-Morse fixed point",
        )
    )
    add(
        CatalogEntry(
            SquaringMap("squaring", options.squaring_upper),
            _expect(equicontinuous=True, mean_eq=True),
            Flags(uniquely_ergodic=True),
            certificates=(
                ContractingFixedPointCertificate(TorusPoint((0.0,))),
            ),
            notes=f"x -> x^2 on [0, {options.squaring_upper}]",
        )
    )
    add(
        _product(
            entries,
            "rotation",
            "squaring",
            _expect(equicontinuous=True, mean_eq=True),
            Flags(),
            notes="mean equicontinuous product, not transitive",
        )
    )
    add(
        _product(
            entries,
            "rotation",
            "full_shift",
            _expect(equicontinuous=False, mean_eq=False),
            Flags(),
            notes="sensitive through the shift coordinate",
        )
    )
    add(
        _product(
            entries,
            "squaring",
            "sturmian",
            _expect(equicontinuous=False, mean_eq=True),
            Flags(),
            notes="mean equicontinuous, not equicontinuous",
        )
    )
    second = Rotation("rotation_silver", (SILVER,))
    add(
        CatalogEntry(
            ProductSystem(
                (entries["rotation"].system, second), "rotation_x_rotation"
            ),
            _expect(equicontinuous=True, mean_eq=True),
            Flags(
                transitive=True,
                minimal=True,
                uniquely_ergodic=True,
                isometry=True,
            ),
            certificates=isometry,
            factors=("rotation", "rotation_silver"),
            notes="golden times silver rotation, max metric",
        )
    )
    cycle = np.abs(np.subtract.outer(np.arange(5), np.arange(5))) / 4
    add(
        CatalogEntry(
            FiniteSystem("finite_permutation", (1, 2, 3, 4, 0), cycle),
            _expect(equicontinuous=True, mean_eq=True),
            Flags(transitive=True, minimal=True, uniquely_ergodic=True),
            notes="5-cycle on {0..4} with d = |i-j|/4",
        )
    )
    add(
        CatalogEntry(
            FiniteSystem("finite_contraction", (0, 0, 1, 2, 3), cycle),
            _expect(equicontinuous=True, mean_eq=True),
            Flags(transitive=True, uniquely_ergodic=True),
            notes="i -> max(i-1, 0) on {0..4} with d = |i-j|/4",
        )
    )
    return list(entries.values())


def find_entry(
    entries: Sequence[CatalogEntry],
    id: str,  # noqa: A002
) -> CatalogEntry:
    for entry in entries:
        if entry.id == id:
            return entry
    msg = f"unknown system {id!r}"
    raise ConfigError("systems", msg)


def sample_pair_near_diagonal(
    entry: CatalogEntry, delta: float, rng_seed: int
) -> tuple[Point, Point]:
    """A reproducible pair closer than ``delta`` for a catalog entry."""
    return pair_near_diagonal(
        entry.system, delta, rng_seed, entry.adversarial_seeds
    )


def sample_points(
    entry: CatalogEntry, count: int, rng_seed: int
) -> list[Point]:
    """The entry's reference points followed by random points."""
    points = list(entry.reference_points)
    rng = derive_rng(rng_seed, 0x5A)
    while len(points) < count:
        points.append(entry.system.sample_point(rng))
    return points[: max(count, len(entry.reference_points))]
