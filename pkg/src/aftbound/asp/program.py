"""Ground normal logic programs and the Gelfond-Lifschitz machinery.

Rules are stored as ``(head, pos, neg)`` over an :class:`AtomUniverse`.
Constraints are encoded as ``f :- body, not f`` with a fresh hidden atom
``f``; hidden atoms never occur in stable models and are omitted from reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ..errors import UsageError
from ..lattice import AtomSet, AtomUniverse, Interval
from ..refine import ANTIMONOTONE, OperatorSpec, oscillating_pair


@dataclass(frozen=True)
class GroundRule:
    head: int
    pos: AtomSet
    neg: AtomSet

    def key(self) -> tuple:
        names = self.pos.universe.atoms
        return (names[self.head], tuple(self.pos.names()), tuple(self.neg.names()))


@dataclass(frozen=True, eq=False)
class GroundProgram:
    universe: AtomUniverse
    rules: tuple
    hidden: AtomSet

    @classmethod
    def from_rules(
        cls,
        rules: Iterable[tuple[str, Sequence[str], Sequence[str]]],
        hidden: Iterable[str] = (),
        atoms: Sequence[str] | None = None,
    ) -> GroundProgram:
        """Build from ``(head, pos, neg)`` name triples.

        Without ``atoms`` the universe is ordered by first occurrence
        (head, then positive body, then negative body); duplicate rules are
        dropped.
        """
        rules = [(h, tuple(p), tuple(n)) for h, p, n in rules]
        if atoms is None:
            seen: dict[str, None] = {}
            for h, p, n in rules:
                seen.setdefault(h)
                for a in p + n:
                    seen.setdefault(a)
            atoms = list(seen)
        u = AtomUniverse(atoms)
        out: dict[tuple, GroundRule] = {}
        for h, p, n in rules:
            r = GroundRule(u.position(h), u.set(p), u.set(n))
            out.setdefault((r.head, r.pos.bits, r.neg.bits), r)
        return cls(u, tuple(out.values()), u.set(hidden))

    @cached_property
    def compiled(self) -> tuple[tuple[int, int, int], ...]:
        """``(head_bit, pos_mask, neg_mask)`` per rule, for the hot loops."""
        return tuple((1 << r.head, r.pos.bits, r.neg.bits) for r in self.rules)

    @cached_property
    def negative_atoms(self) -> AtomSet:
        bits = 0
        for _, _, n in self.compiled:
            bits |= n
        return self.universe.from_bits(bits)

    @property
    def is_positive(self) -> bool:
        return all(n == 0 for _, _, n in self.compiled)

    def visible(self, s: AtomSet) -> list[str]:
        return (s - self.hidden).names()

    def canonical(self) -> tuple:
        """Order-independent structural key: atom names, rule set, hidden names.

        Hidden atoms that occur in no rule are always false and never reported,
        so they are left out.
        """
        used = 0
        for r in self.rules:
            used |= 1 << r.head | r.pos.bits | r.neg.bits
        idle = self.hidden.bits & ~used
        return (
            frozenset(AtomSet(self.universe, self.universe.full_bits & ~idle).names()),
            frozenset(r.key() for r in self.rules),
            frozenset(AtomSet(self.universe, self.hidden.bits & used).names()),
        )

    def __len__(self) -> int:
        return len(self.rules)

    def __repr__(self) -> str:
        return f"GroundProgram({len(self.universe)} atoms, {len(self.rules)} rules)"


def least_model_bits(rules: Iterable[tuple[int, int]]) -> int:
    """Least model of positive rules given as ``(head_bit, pos_mask)`` pairs."""
    pending = list(rules)
    x = 0
    changed = True
    while changed:
        changed = False
        rest = []
        for h, p in pending:
            if p & ~x == 0:
                if not x & h:
                    x |= h
                    changed = True
            else:
                rest.append((h, p))
        pending = rest
    return x


def sp_bits(program: GroundProgram, m: int) -> int:
    """``S_P`` on raw bitmasks: least model of the reduct with respect to ``m``."""
    return least_model_bits((h, p) for h, p, n in program.compiled if not n & m)


def gl_reduct(program: GroundProgram, m: AtomSet) -> GroundProgram:
    """Drop rules whose negative body meets ``m``; strip negation from the rest."""
    u = program.universe
    if m.universe is not u:
        raise UsageError("candidate model comes from a different universe")
    kept = tuple(
        GroundRule(r.head, r.pos, u.bottom) for r in program.rules if not r.neg.bits & m.bits
    )
    return GroundProgram(u, _dedupe(kept), program.hidden)


def _dedupe(rules: Iterable[GroundRule]) -> tuple:
    return tuple({(r.head, r.pos.bits, r.neg.bits): r for r in rules}.values())


def minimal_model(program: GroundProgram) -> AtomSet:
    if not program.is_positive:
        raise UsageError("minimal_model needs a positive program; take the reduct first")
    bits = least_model_bits((h, p) for h, p, _ in program.compiled)
    return program.universe.from_bits(bits)


def gl_operator(program: GroundProgram) -> OperatorSpec:
    """The antimonotone operator ``S_P(M) = least model of the reduct P^M``."""
    u = program.universe

    def apply(m: AtomSet) -> AtomSet:
        return AtomSet(u, sp_bits(program, m.bits))

    return OperatorSpec(apply, u, ANTIMONOTONE, "S_P")


def is_stable_model(program: GroundProgram, m: AtomSet) -> bool:
    return sp_bits(program, m.bits) == m.bits


def well_founded_bound(program: GroundProgram) -> Interval:
    """``[mu, S_P(mu)]`` with ``mu`` the least fixed point of ``S_P∘S_P``."""
    mu, nu = oscillating_pair(gl_operator(program))
    return Interval(mu, nu)


def format_rule(program: GroundProgram, r: GroundRule) -> str:
    atoms = program.universe.atoms
    head = atoms[r.head]
    neg = r.neg
    if program.hidden.bits >> r.head & 1 and r.neg.bits >> r.head & 1:
        # f :- body, not f is how constraints are stored
        head = ""
        neg = neg.without_atom(r.head)
    body = [atoms[i] for i in r.pos.indices()] + [f"not {atoms[i]}" for i in neg.indices()]
    if not body:
        # an unconditional constraint; the body must be non-empty to parse
        return f"{head}." if head else ":- 1 = 1."
    return f"{head} :- {', '.join(body)}." if head else f":- {', '.join(body)}."


def format_program(program: GroundProgram) -> str:
    """Render in the input rule language (facts first, then rules, then constraints)."""
    lines = [format_rule(program, r) for r in program.rules]
    facts = [ln for ln in lines if ":-" not in ln]
    rules = [ln for ln in lines if ":-" in ln and not ln.startswith(":-")]
    cons = [ln for ln in lines if ln.startswith(":-")]
    return "".join(ln + "\n" for ln in facts + rules + cons)
