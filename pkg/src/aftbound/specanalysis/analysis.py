"""Sign analysis under speculative assumptions and the assumption operator Phi.

A state maps every location to ``None`` (unreachable) or a tuple of signs,
one per variable; a row where some variable is ``bot`` is collapsed to
``None``.  ``A(σ)`` is the least fixed point of ``project(σ) ∘ transfer``.

``ok`` classifies an assumption against a state in this order: ``FALSE`` if
the state rules it out (an unreachable location rules out everything), then
``TRUE`` if the state implies it, else ``UNKNOWN``.  Checking refutation first
is what makes ``Safe`` monotone in the state and ``Phi`` antimonotone in
may-mode.  In proved-mode ``Safe_∀`` is not monotone (a coarser state proves
less), so that operator is tagged general and refined by enumeration.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

from ..bnb import BnbConfig, SearchState, bnb_run
from ..errors import UsageError
from ..lattice import AtomSet, Interval, enumerate_interval
from ..refine import ANTIMONOTONE, GENERAL, OperatorSpec
from . import signs
from .ir import Assign, Assumption, MiniProgram

Row = Optional[tuple]
State = tuple

TRUE, FALSE, UNKNOWN = "true", "false", "unknown"
MAY, PROVED = "may", "proved"


def _smash(row: list[int] | tuple) -> Row:
    return None if any(s == signs.BOT for s in row) else tuple(row)


def join_rows(a: Row, b: Row) -> Row:
    if a is None:
        return b
    if b is None:
        return a
    return tuple(signs.join(x, y) for x, y in zip(a, b))


def leq_rows(a: Row, b: Row) -> bool:
    if a is None:
        return True
    if b is None:
        return False
    return all(signs.leq(x, y) for x, y in zip(a, b))


def leq_states(s1: State, s2: State) -> bool:
    return all(leq_rows(a, b) for a, b in zip(s1, s2))


def bottom_state(p: MiniProgram) -> State:
    return (None,) * len(p.blocks)


def top_row(p: MiniProgram) -> tuple:
    return (signs.TOP,) * len(p.variables)


def _operand(p: MiniProgram, row: list[int], x) -> int:
    return signs.of_const(x) if isinstance(x, int) else row[p.var_index[x]]


def exec_block(p: MiniProgram, block: int, row: tuple) -> tuple:
    cur = list(row)
    for s in p.blocks[block].stmts:
        s: Assign
        if s.op in ("const", "copy"):
            v = _operand(p, cur, s.args[0])
        elif s.op == "neg":
            v = signs.negate(_operand(p, cur, s.args[0]))
        elif s.op == "+":
            v = signs.add(_operand(p, cur, s.args[0]), _operand(p, cur, s.args[1]))
        else:
            v = signs.mul(_operand(p, cur, s.args[0]), _operand(p, cur, s.args[1]))
        cur[p.var_index[s.target]] = v
    return tuple(cur)


def _through_edge(p: MiniProgram, row: tuple, guard) -> Row:
    if guard is None:
        return row
    var, cmp, taken = guard
    i = p.var_index[var]
    cur = list(row)
    cur[i] = signs.refine(cur[i], cmp, taken)
    return _smash(cur)


def _inflow(p: MiniProgram, s: State, loc: int) -> Row:
    if loc == p.entry:
        return top_row(p)
    acc: Row = None
    for src, guard in p.predecessors[loc]:
        if s[src] is not None:
            acc = join_rows(acc, _through_edge(p, exec_block(p, src, s[src]), guard))
    return acc


def transfer(p: MiniProgram, s: State) -> State:
    """One parallel step of the abstract transfer function."""
    return tuple(_inflow(p, s, loc) for loc in range(len(p.blocks)))


def _assumptions(p: MiniProgram, sigma) -> list[Assumption]:
    if sigma is None:
        return []
    if isinstance(sigma, AtomSet):
        if sigma.universe is not p.assumption_universe:
            raise UsageError("assumption set is over a different assumption universe")
        return [p.assumptions[i] for i in sigma.indices()]
    return list(sigma)


def _project_row(p: MiniProgram, row: Row, assumed: list[Assumption]) -> Row:
    if row is None or not assumed:
        return row
    cur = list(row)
    for a in assumed:
        i = p.var_index[a.var]
        cur[i] = signs.meet(cur[i], a.sign)
    return _smash(cur)


def _by_location(p: MiniProgram, assumed: list[Assumption]) -> list[list[Assumption]]:
    out: list[list[Assumption]] = [[] for _ in p.blocks]
    for a in assumed:
        out[p.block_index[a.loc]].append(a)
    return out


def project(p: MiniProgram, sigma, s: State) -> State:
    """Meet every assumed sign into its location; monotone, reductive, idempotent."""
    per_loc = _by_location(p, _assumptions(p, sigma))
    return tuple(_project_row(p, row, per_loc[i]) for i, row in enumerate(s))


def analyze(p: MiniProgram, sigma=None) -> State:
    """Least fixed point of ``project(σ) ∘ transfer`` by a worklist in reverse postorder."""
    per_loc = _by_location(p, _assumptions(p, sigma))
    rank = {loc: k for k, loc in enumerate(p.reverse_postorder)}
    succs = [[dst for dst, _ in es] for es in p.edges]
    state = list(bottom_state(p))
    heap = [(rank[i], i) for i in range(len(p.blocks))]
    heapq.heapify(heap)
    queued = set(range(len(p.blocks)))
    while heap:
        _, loc = heapq.heappop(heap)
        queued.discard(loc)
        new = _project_row(p, _inflow(p, state, loc), per_loc[loc])
        if new != state[loc]:
            state[loc] = new
            for d in succs[loc]:
                if d not in queued:
                    queued.add(d)
                    heapq.heappush(heap, (rank[d], d))
    return tuple(state)


def analyze_kleene(p: MiniProgram, sigma=None) -> State:
    """Whole-state Kleene iteration; slow reference for :func:`analyze`."""
    s = bottom_state(p)
    while True:
        nxt = project(p, sigma, transfer(p, s))
        if nxt == s:
            return s
        s = nxt


def sign_at(p: MiniProgram, s: State, a: Assumption) -> int:
    row = s[p.block_index[a.loc]]
    return signs.BOT if row is None else row[p.var_index[a.var]]


def ok(p: MiniProgram, s: State, a: Assumption) -> str:
    v = sign_at(p, s, a)
    if v & a.sign == 0:
        return FALSE
    if signs.leq(v, a.sign):
        return TRUE
    return UNKNOWN


def ok_and_safe(p: MiniProgram, s: State, mode: str = MAY) -> AtomSet:
    """``Safe`` (may: not refuted) or ``Safe_∀`` (proved: implied) as an assumption set."""
    if mode not in (MAY, PROVED):
        raise UsageError(f"mode must be {MAY!r} or {PROVED!r}")
    keep = (TRUE, UNKNOWN) if mode == MAY else (TRUE,)
    u = p.assumption_universe
    bits = 0
    for i, a in enumerate(p.assumptions):
        if ok(p, s, a) in keep:
            bits |= 1 << i
    return u.from_bits(bits)


def phi_operator(p: MiniProgram, mode: str = MAY) -> OperatorSpec:
    """``Phi(σ) = Safe(A(σ))`` over subsets of the declared assumptions (memoized)."""
    if mode not in (MAY, PROVED):
        raise UsageError(f"mode must be {MAY!r} or {PROVED!r}")
    memo: dict[int, AtomSet] = {}

    def apply(sigma: AtomSet) -> AtomSet:
        hit = memo.get(sigma.bits)
        if hit is None:
            hit = memo[sigma.bits] = ok_and_safe(p, analyze(p, sigma), mode)
        return hit

    tag = ANTIMONOTONE if mode == MAY else GENERAL
    return OperatorSpec(apply, p.assumption_universe, tag, f"Phi[{mode}]")


def brute_force_stable_sets(p: MiniProgram, mode: str = MAY, cap: int = 1 << 16) -> list[AtomSet]:
    """Every σ with ``Phi(σ) = σ``, by checking all subsets of the assumptions."""
    u = p.assumption_universe
    found = []
    for sigma in u.enumerate(u.bottom, u.top, cap):
        if ok_and_safe(p, analyze_kleene(p, sigma), mode) == sigma:
            found.append(sigma)
    return found


@dataclass
class StableAssumptionReport:
    intervals: list[Interval]
    stable: list[tuple[AtomSet, State]]  # each stable set with its analysis
    search: SearchState

    def stable_sets(self) -> list[AtomSet]:
        return [s for s, _ in self.stable]


def stable_assumption_sets(
    p: MiniProgram, mode: str = MAY, cfg: BnbConfig = BnbConfig(), enum_cap: int = 1 << 16
) -> StableAssumptionReport:
    """Search ``[∅, A]`` for fixed points of Phi and report them with their analyses.

    Final intervals that are not singletons are enumerated to list the exact
    stable sets inside them.
    """
    op = phi_operator(p, mode)
    u = p.assumption_universe
    state = bnb_run(op, Interval(u.bottom, u.top), cfg)
    found: dict[int, AtomSet] = {}
    for b in list(state.final) + list(state.bounds):
        for sigma in enumerate_interval(b, enum_cap):
            if op(sigma) == sigma:
                found.setdefault(sigma.bits, sigma)
    for sigma in state.fixed_points_found:
        found.setdefault(sigma.bits, sigma)
    stable = [(s, analyze(p, s)) for _, s in sorted(found.items())]
    return StableAssumptionReport(list(state.final), stable, state)


def state_to_json(p: MiniProgram, s: State) -> dict:
    return {
        b.name: None if row is None else {v: signs.name(x) for v, x in zip(p.variables, row)}
        for b, row in zip(p.blocks, s)
    }

