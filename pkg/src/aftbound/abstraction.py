"""Abstract refinement through Galois insertions built from atom partitions.

A partition of the atoms into blocks gives a powerset lattice over blocks.
A concrete set ``S`` abstracts downward to the blocks contained in ``S`` and
upward to the blocks meeting ``S``; an abstract set concretizes to the union
of its blocks.  Refinement in the abstract lattice uses the best transformer
``α_lower ∘ f ∘ γ`` for the lower envelope and ``α_upper ∘ f ∘ γ`` for the
upper one.  The result is at least as wide as the abstraction of the concrete
refinement whenever ``f_flat ∘ α_lower <= α_lower ∘ f`` and
``α_upper ∘ f <= f_sharp ∘ α_upper``; that covers monotone and antimonotone
operators in practice, but the best transformers of an arbitrary operator can
violate it and lose fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvariantError, UsageError
from .lattice import AtomSet, AtomUniverse, Interval
from .refine import OperatorSpec, RefineConfig, envelope, refine_step


@dataclass(frozen=True, eq=False)
class Partition:
    concrete: AtomUniverse
    blocks: tuple  # tuple[AtomSet, ...]

    def __post_init__(self):
        seen = 0
        for b in self.blocks:
            if b.universe is not self.concrete:
                raise UsageError("partition block is over a different universe")
            if not b:
                raise UsageError("partition blocks must be non-empty")
            if b.bits & seen:
                raise UsageError("partition blocks overlap")
            seen |= b.bits
        if seen != self.concrete.full_bits:
            raise UsageError("partition blocks do not cover the universe")
        object.__setattr__(self, "abstract", AtomUniverse(f"b{i}" for i in range(len(self.blocks))))

    @classmethod
    def from_names(cls, universe: AtomUniverse, blocks: Sequence[Sequence[str]]) -> Partition:
        return cls(universe, tuple(universe.set(b) for b in blocks))

    @classmethod
    def singletons(cls, universe: AtomUniverse) -> Partition:
        return cls(universe, tuple(universe.set([i]) for i in range(len(universe))))

    @classmethod
    def whole(cls, universe: AtomUniverse) -> Partition:
        return cls(universe, (universe.top,)) if len(universe) else cls(universe, ())

    def to_json(self) -> list[list[str]]:
        return [b.names() for b in self.blocks]


@dataclass(frozen=True)
class GaloisPair:
    """Two Galois insertions between a concrete and an abstract lattice.

    ``alpha_upper ⊣ gamma_upper`` over-approximates and
    ``gamma_lower ⊣ alpha_lower`` under-approximates.
    """

    alpha_lower: Callable[[AtomSet], AtomSet]
    alpha_upper: Callable[[AtomSet], AtomSet]
    gamma_lower: Callable[[AtomSet], AtomSet]
    gamma_upper: Callable[[AtomSet], AtomSet]

    def alpha(self, b: Interval) -> Interval:
        return Interval(self.alpha_lower(b.lo), self.alpha_upper(b.hi))

    def gamma(self, b: Interval) -> Interval:
        return Interval(self.gamma_lower(b.lo), self.gamma_upper(b.hi))


def alpha_maps(part: Partition, s: AtomSet) -> tuple[AtomSet, AtomSet]:
    """``(blocks inside s, blocks meeting s)``."""
    lower = upper = 0
    for i, b in enumerate(part.blocks):
        if b.bits & ~s.bits == 0:
            lower |= 1 << i
        if b.bits & s.bits:
            upper |= 1 << i
    a = part.abstract
    return a.from_bits(lower), a.from_bits(upper)


def gamma_map(part: Partition, t: AtomSet) -> AtomSet:
    bits = 0
    for i in t.indices():
        bits |= part.blocks[i].bits
    return part.concrete.from_bits(bits)


def galois_pair(part: Partition) -> GaloisPair:
    def gamma(t: AtomSet) -> AtomSet:
        return gamma_map(part, t)

    return GaloisPair(
        lambda s: alpha_maps(part, s)[0],
        lambda s: alpha_maps(part, s)[1],
        gamma,
        gamma,
    )


def best_transformers(part: Partition, op: OperatorSpec) -> tuple[OperatorSpec, OperatorSpec]:
    """``(f_flat, f_sharp)``; composing with monotone maps keeps the tag of ``op``."""
    g = galois_pair(part)

    def flat(t: AtomSet) -> AtomSet:
        return g.alpha_lower(op.apply(g.gamma_lower(t)))

    def sharp(t: AtomSet) -> AtomSet:
        return g.alpha_upper(op.apply(g.gamma_upper(t)))

    a = part.abstract
    return (
        OperatorSpec(flat, a, op.monotonicity, f"{op.name}_flat"),
        OperatorSpec(sharp, a, op.monotonicity, f"{op.name}_sharp"),
    )


def abstract_operator(part: Partition, op: OperatorSpec, cap: int | None = None) -> OperatorSpec:
    """An abstract-lattice operator whose envelopes come from the two best transformers."""
    f_flat, f_sharp = best_transformers(part, op)
    kw = {} if cap is None else {"cap": cap}
    return OperatorSpec(
        f_sharp.apply,
        part.abstract,
        op.monotonicity,
        f"{op.name}#",
        lower_envelope=lambda b, x: envelope(f_flat, b, x, "lower", **kw),
        upper_envelope=lambda b, x: envelope(f_sharp, b, x, "upper", **kw),
    )


def abstract_refine_step(
    part: Partition, op: OperatorSpec, b_abstract: Interval, cfg: RefineConfig = RefineConfig()
) -> Interval:
    if not b_abstract.valid:
        raise UsageError("abstract refinement needs a valid interval")
    result, _ = refine_step(abstract_operator(part, op, cfg.enum_cap), b_abstract, cfg)
    return result


@dataclass
class SoundnessReport:
    concrete: Interval  # F(B)
    alpha_of_concrete: Interval  # α(F(B))
    abstract: Interval  # F#(α(B))
    holds: bool  # α(F(B)) is inside F#(α(B))
    validity_kept: bool  # α(F(B)) valid implies F#(α(B)) valid

    @property
    def exact(self) -> bool:
        return self.alpha_of_concrete == self.abstract


def soundness_check(
    part: Partition,
    op: OperatorSpec,
    b: Interval,
    cfg: RefineConfig = RefineConfig(fast_path=False),
    strict: bool = True,
) -> SoundnessReport:
    """Compare ``α(F(B))`` with ``F#(α(B))``.  Raises InvariantError on violation if ``strict``."""
    if not b.valid:
        raise UsageError("soundness_check needs a valid concrete interval")
    g = galois_pair(part)
    concrete, _ = refine_step(op, b, cfg)
    a_conc = g.alpha(concrete)
    a_out = abstract_refine_step(part, op, g.alpha(b), cfg)
    holds = a_conc.within(a_out)
    cor = (not a_conc.valid) or a_out.valid
    if strict and not (holds and cor):
        raise InvariantError(
            f"abstraction unsound on {b!r}: alpha(F(B)) = {a_conc!r}, F#(alpha(B)) = {a_out!r}"
        )
    return SoundnessReport(concrete, a_conc, a_out, holds, cor)
