"""Solver pre-processing from a bound ``[lo, hi]`` on stable models.

Two partial evaluators are provided.

``"safe"`` (default) is exact for any valid bound: the stable models of the
output, restricted to the original atoms, are exactly the input's stable
models inside ``[lo, hi]``.  Atoms outside ``hi`` are set false (rules they
would fire become constraints, ``not x`` literals disappear, rules needing
``x`` are dropped) and each atom of ``lo`` is required by a constraint.

``"substitute"`` additionally asserts the atoms of ``lo`` as facts and deletes
them from rule bodies.  That is only exact when every atom of ``lo`` is
derivable whatever happens inside the bound and nothing outside ``hi`` can
be derived once ``lo`` holds (``lo ⊆ S_P(hi)`` and ``S_P(lo) ⊆ hi``), which
is checked.  Well-founded bounds and bounds around single stable models
satisfy both conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UsageError
from ..lattice import AtomSet, AtomUniverse, Interval
from .program import GroundProgram, sp_bits

SAFE = "safe"
SUBSTITUTE = "substitute"


@dataclass(frozen=True)
class AppliedBound:
    lower: frozenset
    excluded: frozenset
    mode: str


@dataclass(frozen=True, eq=False)
class PartialEvaluation:
    program: GroundProgram
    applied: AppliedBound


def _normalize(program: GroundProgram, lower: set[str], excluded: set[str]) -> tuple[int, int]:
    u = program.universe
    lo = u.set(sorted(lower, key=u.position)).bits & ~program.hidden.bits
    ex = u.set(sorted(excluded, key=u.position)).bits & ~program.hidden.bits
    if lo & ex:
        raise UsageError("the bound is invalid: an atom is both required and excluded")
    return lo, ex


def _bound_names(program: GroundProgram, bound: Interval) -> tuple[set[str], set[str]]:
    if not bound.valid:
        raise UsageError(f"cannot partially evaluate with the invalid bound {bound!r}")
    hidden = set(program.hidden.names())
    lower = set(bound.lo.names()) - hidden
    excluded = set((~bound.hi).names()) - hidden
    return lower, excluded


def _evaluate(program: GroundProgram, lower: set[str], excluded: set[str], mode: str) -> GroundProgram:
    u = program.universe
    atoms = u.atoms
    lo, ex = _normalize(program, lower, excluded)
    extra: list[str] = []
    out: list[tuple[str, list[str], list[str]]] = []

    def fresh(name: str) -> str:
        if name not in u.index and name not in extra:
            extra.append(name)
        return name

    def names(bits: int) -> list[str]:
        return AtomSet(u, bits).names()

    if mode == SUBSTITUTE:
        full = u.full_bits
        if sp_bits(program, full & ~ex) & lo != lo:
            raise UsageError("substitute mode needs every required atom derivable in the whole bound; use safe mode")
        if sp_bits(program, lo) & ex:
            raise UsageError("substitute mode needs excluded atoms underivable once the lower bound holds; use safe mode")
        for i in AtomSet(u, lo).indices():
            out.append((atoms[i], [], []))
        for r in program.rules:
            h = 1 << r.head
            if h & (lo | ex) or r.neg.bits & lo or r.pos.bits & ex:
                continue
            out.append((atoms[r.head], names(r.pos.bits & ~lo), names(r.neg.bits & ~ex)))
    elif mode == SAFE:
        for r in program.rules:
            if r.neg.bits & lo or r.pos.bits & ex:
                continue
            pos, neg = names(r.pos.bits), names(r.neg.bits & ~ex)
            if 1 << r.head & ex:
                out_atom = fresh(f"_out_{atoms[r.head]}")
                out.append((out_atom, pos, neg + [out_atom]))
            else:
                out.append((atoms[r.head], pos, neg))
        for i in AtomSet(u, lo).indices():
            in_atom = fresh(f"_in_{atoms[i]}")
            out.append((in_atom, [], [atoms[i], in_atom]))
    else:
        raise UsageError(f"unknown partial evaluation mode {mode!r}")
    hidden = program.hidden.names() + extra
    return GroundProgram.from_rules(out, hidden, atoms=list(atoms) + extra)


def partial_eval(program: GroundProgram, bound: Interval, mode: str = SAFE) -> PartialEvaluation:
    """Specialize ``program`` to the stable models inside ``bound``.

    New hidden atoms are appended to the universe, so original atom positions
    are unchanged.
    """
    if bound.lo.universe is not program.universe or bound.hi.universe is not program.universe:
        raise UsageError("the bound must be over the program's universe")
    lower, excluded = _bound_names(program, bound)
    pe = _evaluate(program, lower, excluded, mode)
    return PartialEvaluation(pe, AppliedBound(frozenset(lower), frozenset(excluded), mode))


def compose_partial_eval(cached: PartialEvaluation, bound2: Interval) -> PartialEvaluation:
    """Refine a cached partial evaluation with a tighter bound.

    ``bound2`` may be expressed over the original universe or over the cached
    program's universe; it must lie inside the bound already applied.
    """
    prog = cached.program
    lower, excluded = _bound_names(prog, bound2)
    if not (cached.applied.lower <= lower and cached.applied.excluded <= excluded):
        raise UsageError("the new bound is not inside the bound the cached program was built for")
    unknown = (lower | excluded) - set(prog.universe.atoms)
    if unknown:
        raise UsageError(f"unknown atoms in bound: {sorted(unknown)}")
    pe = _evaluate(prog, lower, excluded, cached.applied.mode)
    return PartialEvaluation(pe, AppliedBound(frozenset(lower), frozenset(excluded), cached.applied.mode))


def emit_assumptions(bound: Interval, hidden: AtomSet | None = None) -> str:
    """Unit literals for a solver: required atoms, then ``-x`` for each excluded atom.

    Each group is listed in universe order; hidden atoms are omitted.
    """
    if not bound.valid:
        raise UsageError(f"cannot emit assumptions for the invalid bound {bound!r}")
    lo, out = bound.lo, ~bound.hi
    if hidden is not None:
        lo, out = lo - hidden, out - hidden
    lines = lo.names() + [f"-{a}" for a in out.names()]
    return "".join(ln + "\n" for ln in lines)


def bound_from_json(universe: AtomUniverse, obj: dict, hidden: AtomSet | None = None) -> Interval:
    """Read ``{"lower": [...], "excluded": [...]}`` (both keys optional)."""
    if not isinstance(obj, dict):
        raise UsageError("a bounds file must hold a JSON object")
    unknown_keys = set(obj) - {"lower", "excluded"}
    if unknown_keys:
        raise UsageError(f"unexpected keys in bounds file: {sorted(unknown_keys)}")
    lower, excluded = obj.get("lower", []), obj.get("excluded", [])
    hidden_names = set(hidden.names()) if hidden is not None else set()
    for a in list(lower) + list(excluded):
        if a not in universe.index or a in hidden_names:
            raise UsageError(f"unknown atom {a!r} in bounds file")
    b = Interval(universe.set(lower), ~universe.set(excluded))
    if not b.valid:
        raise UsageError("the bounds file requires and excludes the same atom")
    return b


def restrict(models: list[AtomSet], bound: Interval) -> list[AtomSet]:
    return [m for m in models if m in bound]


def project_models(models: list[AtomSet], universe: AtomUniverse) -> list[AtomSet]:
    """Re-express models of an evaluated program over the original universe."""
    return sorted({universe.set(a for a in m.names() if a in universe.index) for m in models}, key=lambda s: s.bits)
