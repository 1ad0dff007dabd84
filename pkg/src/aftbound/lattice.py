"""Finite powerset lattices, intervals over them, and interval arithmetic.

An :class:`AtomUniverse` fixes an ordered set of atom names; an
:class:`AtomSet` is a bit-vector over that universe.  Intervals are plain
``(lo, hi)`` pairs that may be invalid (``lo`` not below ``hi``); the
refinement operator relies on invalid intervals as evidence that a region
holds no fixed point, so they are never normalized away.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Protocol, Sequence, runtime_checkable

from .errors import ResourceCapError, UnsupportedCapabilityError, UsageError

DEFAULT_ENUM_CAP = 1 << 20


@runtime_checkable
class Lattice(Protocol):
    """Minimal capability contract for a complete lattice.

    Optional capabilities (checked with ``hasattr``): ``enumerate(lo, hi, cap)``,
    ``cardinality(lo, hi)``, ``height(lo, hi)`` and ``element_to_json(x)``.
    """

    @property
    def bottom(self) -> Any: ...

    @property
    def top(self) -> Any: ...

    def leq(self, a: Any, b: Any) -> bool: ...

    def join(self, a: Any, b: Any) -> Any: ...

    def meet(self, a: Any, b: Any) -> Any: ...


class AtomUniverse:
    """An ordered, duplicate-free list of atom names.

    Universes compare by identity: two universes built from the same names
    are still different lattices.  Use :meth:`translate` to move sets across.
    """

    __slots__ = ("atoms", "index", "full_bits", "_bottom", "_top")

    def __init__(self, atoms: Iterable[str]):
        self.atoms: tuple[str, ...] = tuple(atoms)
        self.index: dict[str, int] = {a: i for i, a in enumerate(self.atoms)}
        if len(self.index) != len(self.atoms):
            dup = sorted({a for a in self.atoms if self.atoms.count(a) > 1})
            raise UsageError(f"duplicate atom names: {dup}")
        self.full_bits = (1 << len(self.atoms)) - 1
        self._bottom = AtomSet(self, 0)
        self._top = AtomSet(self, self.full_bits)

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"AtomUniverse({list(self.atoms)!r})"

    @property
    def bottom(self) -> AtomSet:
        return self._bottom

    @property
    def top(self) -> AtomSet:
        return self._top

    def set(self, names: Iterable[str | int] = ()) -> AtomSet:
        bits = 0
        for n in names:
            bits |= 1 << self.position(n)
        return AtomSet(self, bits)

    def from_bits(self, bits: int) -> AtomSet:
        if bits & ~self.full_bits:
            raise UsageError("bit-vector references positions outside the universe")
        return AtomSet(self, bits)

    def position(self, atom: str | int) -> int:
        if isinstance(atom, int):
            if not 0 <= atom < len(self.atoms):
                raise UsageError(f"atom position {atom} out of range")
            return atom
        try:
            return self.index[atom]
        except KeyError:
            raise UsageError(f"unknown atom {atom!r}") from None

    def interval(self, lo: Iterable[str | int] = (), hi: Iterable[str | int] | None = None) -> Interval:
        """Convenience constructor; ``hi=None`` means the full universe."""
        return Interval(self.set(lo), self.top if hi is None else self.set(hi))

    def translate(self, s: AtomSet) -> AtomSet:
        """Re-express ``s`` (from another universe) by atom name."""
        return self.set(s.names())

    # -- lattice capabilities -------------------------------------------------

    def leq(self, a: AtomSet, b: AtomSet) -> bool:
        return a <= b

    def join(self, a: AtomSet, b: AtomSet) -> AtomSet:
        return a | b

    def meet(self, a: AtomSet, b: AtomSet) -> AtomSet:
        return a & b

    def height(self, lo: AtomSet, hi: AtomSet) -> int:
        return (hi.bits & ~lo.bits).bit_count() if lo <= hi else 0

    def cardinality(self, lo: AtomSet, hi: AtomSet) -> int:
        return 1 << (hi.bits & ~lo.bits).bit_count() if lo <= hi else 0

    def enumerate(self, lo: AtomSet, hi: AtomSet, cap: int = DEFAULT_ENUM_CAP) -> Iterator[AtomSet]:
        """All sets between ``lo`` and ``hi``, lowest free atom varying fastest."""
        _same_universe(lo, hi)
        if not lo <= hi:
            return iter(())
        free = hi.bits & ~lo.bits
        if 1 << free.bit_count() > cap:
            raise ResourceCapError(
                f"interval has 2^{free.bit_count()} elements, cap is {cap}"
            )
        return (AtomSet(self, lo.bits | sub) for sub in submasks(free))

    def element_to_json(self, x: AtomSet) -> list[str]:
        return x.names()


def submasks(mask: int) -> Iterator[int]:
    """Submasks of ``mask`` in increasing numeric order, starting with 0."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


class AtomSet:
    """Immutable subset of an :class:`AtomUniverse` backed by an int bitmask."""

    __slots__ = ("universe", "bits")

    # Treated as immutable; nothing in the package mutates these fields.
    def __init__(self, universe: AtomUniverse, bits: int = 0):
        self.universe = universe
        self.bits = bits

    # -- order and lattice operations -----------------------------------------

    def __le__(self, other: AtomSet) -> bool:
        _same_universe(self, other)
        return self.bits & ~other.bits == 0

    def __ge__(self, other: AtomSet) -> bool:
        return other <= self

    def __lt__(self, other: AtomSet) -> bool:
        return self <= other and self.bits != other.bits

    def __gt__(self, other: AtomSet) -> bool:
        return other < self

    def __or__(self, other: AtomSet) -> AtomSet:
        _same_universe(self, other)
        return AtomSet(self.universe, self.bits | other.bits)

    def __and__(self, other: AtomSet) -> AtomSet:
        _same_universe(self, other)
        return AtomSet(self.universe, self.bits & other.bits)

    def __sub__(self, other: AtomSet) -> AtomSet:
        _same_universe(self, other)
        return AtomSet(self.universe, self.bits & ~other.bits)

    def __invert__(self) -> AtomSet:
        return AtomSet(self.universe, self.universe.full_bits & ~self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AtomSet):
            return NotImplemented
        return self.bits == other.bits and self.universe is other.universe

    def __hash__(self) -> int:
        return hash(self.bits)

    # -- container protocol ---------------------------------------------------

    def __contains__(self, atom: str | int) -> bool:
        return bool(self.bits >> self.universe.position(atom) & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def __bool__(self) -> bool:
        return self.bits != 0

    def indices(self) -> list[int]:
        bits, out, i = self.bits, [], 0
        while bits:
            if bits & 1:
                out.append(i)
            bits >>= 1
            i += 1
        return out

    def names(self) -> list[str]:
        atoms = self.universe.atoms
        return [atoms[i] for i in self.indices()]

    def with_atom(self, atom: str | int) -> AtomSet:
        return AtomSet(self.universe, self.bits | 1 << self.universe.position(atom))

    def without_atom(self, atom: str | int) -> AtomSet:
        return AtomSet(self.universe, self.bits & ~(1 << self.universe.position(atom)))

    def __repr__(self) -> str:
        return "{" + ",".join(self.names()) + "}"


def _same_universe(a: AtomSet, b: AtomSet) -> None:
    if a.universe is not b.universe:
        raise UsageError("atom sets come from different universes")


@dataclass(frozen=True)
class Interval:
    """A pair ``[lo, hi]`` of lattice elements; may be invalid."""

    lo: Any
    hi: Any

    @property
    def valid(self) -> bool:
        return self.lo <= self.hi

    def within(self, other: Interval) -> bool:
        """Precision order on pairs: ``other.lo <= lo`` and ``hi <= other.hi``.

        Defined on endpoints so that it also applies to invalid pairs.
        """
        return other.lo <= self.lo and self.hi <= other.hi

    def __contains__(self, x: Any) -> bool:
        return self.lo <= x and x <= self.hi

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def __repr__(self) -> str:
        flag = "" if self.valid else "!"
        return f"{flag}[{self.lo!r}, {self.hi!r}]"


# ---------------------------------------------------------------------------
# Interval operations on powerset lattices


def is_valid_interval(lo: Any, hi: Any) -> bool:
    if isinstance(lo, AtomSet) and isinstance(hi, AtomSet):
        _same_universe(lo, hi)
    return lo <= hi


def _require_powerset(*intervals: Interval) -> AtomUniverse:
    universe = None
    for b in intervals:
        if not (isinstance(b.lo, AtomSet) and isinstance(b.hi, AtomSet)):
            raise UnsupportedCapabilityError(
                "exact interval cardinality needs a finite powerset lattice"
            )
        _same_universe(b.lo, b.hi)
        if universe is None:
            universe = b.lo.universe
        elif b.lo.universe is not universe:
            raise UsageError("intervals come from different universes")
    return universe


def interval_height(b: Interval) -> int:
    _require_powerset(b)
    return (b.hi.bits & ~b.lo.bits).bit_count() if b.valid else 0


def interval_cardinality(b: Interval) -> int:
    """Number of lattice points in ``b``: ``2**|hi - lo|``, or 0 if invalid."""
    _require_powerset(b)
    if not b.valid:
        return 0
    return 1 << (b.hi.bits & ~b.lo.bits).bit_count()


def hull(b1: Interval, b2: Interval) -> Interval:
    """Join under the precision order: ``[lo1 & lo2, hi1 | hi2]``."""
    return Interval(b1.lo & b2.lo, b1.hi | b2.hi)


def intersection(b1: Interval, b2: Interval) -> Interval:
    """Point-set intersection; invalid when the two are disjoint."""
    return Interval(b1.lo | b2.lo, b1.hi & b2.hi)


def adjacent(b1: Interval, b2: Interval) -> bool:
    """True iff the point-set union of ``b1`` and ``b2`` is itself an interval.

    The union is always contained in the hull, so it equals the hull exactly
    when the counts agree: ``|hull| == |b1| + |b2| - |b1 ∩ b2|``.
    """
    _require_powerset(b1, b2)
    total = (
        interval_cardinality(b1)
        + interval_cardinality(b2)
        - interval_cardinality(intersection(b1, b2))
    )
    return interval_cardinality(hull(b1, b2)) == total


# Atom-selection policies for decompose ---------------------------------------

AtomChooser = Callable[[Interval], int]


def lowest_index(b: Interval) -> int:
    free = b.hi.bits & ~b.lo.bits
    return (free & -free).bit_length() - 1


class MostFrequent:
    """Prefer the free atom with the highest weight (ties: lowest index)."""

    def __init__(self, weights: Sequence[int]):
        self.weights = list(weights)

    def __call__(self, b: Interval) -> int:
        free = AtomSet(b.lo.universe, b.hi.bits & ~b.lo.bits).indices()
        return max(free, key=lambda i: (self.weights[i], -i))


class SeededRandom:
    """Pseudo-random but reproducible: the choice depends on seed and interval."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def __call__(self, b: Interval) -> int:
        free = AtomSet(b.lo.universe, b.hi.bits & ~b.lo.bits).indices()
        rng = random.Random(f"{self.seed}:{b.lo.bits}:{b.hi.bits}")
        return rng.choice(free)


def decompose(b: Interval, chooser: AtomChooser = lowest_index) -> tuple[Interval, Interval]:
    """Split on one free atom into two disjoint, adjacent halves.

    A singleton comes back as ``(b, b)``.
    """
    _require_powerset(b)
    if not b.valid:
        raise UsageError("cannot decompose an invalid interval")
    free = b.hi.bits & ~b.lo.bits
    if not free:
        return b, b
    a = chooser(b)
    if not free >> a & 1:
        raise UsageError(f"chooser picked atom {a}, which is not free in {b!r}")
    return Interval(b.lo, b.hi.without_atom(a)), Interval(b.lo.with_atom(a), b.hi)


def enumerate_interval(b: Interval, cap: int = DEFAULT_ENUM_CAP) -> list[AtomSet]:
    universe = _require_powerset(b)
    return list(universe.enumerate(b.lo, b.hi, cap))


# Serialization --------------------------------------------------------------


def interval_to_json(b: Interval) -> dict:
    _require_powerset(b)
    return {"lower": b.lo.names(), "upper": b.hi.names(), "valid": b.valid}


def interval_from_json(universe: AtomUniverse, obj: dict) -> Interval:
    try:
        return Interval(universe.set(obj["lower"]), universe.set(obj["upper"]))
    except KeyError as exc:
        raise UsageError(f"interval object lacks key {exc}") from None


def interval_key(b: Interval) -> str:
    """Canonical string used for deterministic tie-breaking."""
    return json.dumps(interval_to_json(b), separators=(",", ":"))


def check_lattice_laws(lat: Lattice, samples: Sequence[Any]) -> list[str]:
    """Return descriptions of every violated law over triples of ``samples``."""
    bad = []
    leq, join, meet = lat.leq, lat.join, lat.meet
    for a in samples:
        if not leq(a, a):
            bad.append(f"reflexivity fails at {a!r}")
        if not (leq(lat.bottom, a) and leq(a, lat.top)):
            bad.append(f"bounds fail at {a!r}")
        for b in samples:
            if join(a, b) != join(b, a) or meet(a, b) != meet(b, a):
                bad.append(f"commutativity fails at {a!r},{b!r}")
            if join(a, meet(a, b)) != a or meet(a, join(a, b)) != a:
                bad.append(f"absorption fails at {a!r},{b!r}")
            if join(a, a) != a or meet(a, a) != a:
                bad.append(f"idempotence fails at {a!r}")
            if leq(a, b) and leq(b, a) and a != b:
                bad.append(f"antisymmetry fails at {a!r},{b!r}")
            if leq(a, b) != (join(a, b) == b):
                bad.append(f"order/join mismatch at {a!r},{b!r}")
            for c in samples:
                if join(join(a, b), c) != join(a, join(b, c)):
                    bad.append(f"join associativity fails at {a!r},{b!r},{c!r}")
                if meet(meet(a, b), c) != meet(a, meet(b, c)):
                    bad.append(f"meet associativity fails at {a!r},{b!r},{c!r}")
                if leq(a, b) and leq(b, c) and not leq(a, c):
                    bad.append(f"transitivity fails at {a!r},{b!r},{c!r}")
    return bad
