"""Sound branch-and-bound tightening of converged bounds on powerset lattices.

Starting from ``IR(B_I)``, each active interval is split in two, each half is
refined, halves that refinement proves empty of fixed points are pruned, and
surviving halves that are adjacent are glued back together.  An interval whose
split glues back to itself is finalized (it is "stalled").  At every point the
fixed points inside ``B_I`` are covered by ``final ∪ bounds``, so the search
may be interrupted at any outer iteration.

With a budget ``K`` the active set is kept at size ``<= K`` by repeatedly
replacing the pair whose hull adds the fewest points.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .errors import InvariantError, UsageError
from .lattice import (
    AtomChooser,
    Interval,
    adjacent,
    decompose,
    hull,
    interval_cardinality,
    interval_height,
    interval_key,
    interval_to_json,
    lowest_index,
)
from .refine import OperatorSpec, RefineConfig, phi_check

EXHAUSTIVE = "exhaustive"
FIRST = "first-fixed-point"


@dataclass(frozen=True)
class BnbConfig:
    budget: Optional[int] = None
    outer_cap: Optional[int] = None
    ir_config: RefineConfig = RefineConfig()
    stop_mode: str = EXHAUSTIVE
    decompose_policy: AtomChooser = lowest_index
    # Drop finalized singletons whose point is not a fixed point.
    discard_non_fixed: bool = True
    # On a stall, retry the split on the other free atoms before finalizing.
    resplit_on_stall: bool = False
    check_invariants: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.budget is not None and self.budget < 1:
            raise UsageError("budget K must be at least 1")
        if self.budget is not None and self.outer_cap is None:
            raise UsageError("a budget needs an outer iteration cap: termination is no longer guaranteed")
        if self.outer_cap is not None and self.outer_cap < 0:
            raise UsageError("outer cap must be non-negative")
        if self.stop_mode not in (EXHAUSTIVE, FIRST):
            raise UsageError(f"unknown stop mode {self.stop_mode!r}")
        if self.workers < 1:
            raise UsageError("workers must be at least 1")


@dataclass
class SearchState:
    bounds: list[Interval]
    final: list[Interval]
    fixed_points_found: list
    outer_iterations: int
    ir_calls: int
    stalled: list[Interval] = field(default_factory=list)
    converged: bool = False
    root: Optional[Interval] = None  # IR(B_I), None if B_I was refuted outright

    def snapshot(self) -> SearchState:
        return replace(
            self,
            bounds=list(self.bounds),
            final=list(self.final),
            fixed_points_found=list(self.fixed_points_found),
            stalled=list(self.stalled),
        )

    def covers(self, x) -> bool:
        return any(x in b for b in itertools.chain(self.final, self.bounds))

    def to_json(self) -> dict:
        return {
            "final": [interval_to_json(b) for b in self.final],
            "active": [interval_to_json(b) for b in self.bounds],
            "fixed_points": [x.names() for x in self.fixed_points_found],
            "outer_iterations": self.outer_iterations,
            "ir_calls": self.ir_calls,
            "stalled": [interval_to_json(b) for b in self.stalled],
        }


def merge_adjacent(bounds: list[Interval]) -> list[Interval]:
    """Glue adjacent pairs (their union is their hull) until none remain."""
    out = list(bounds)
    merged = True
    while merged:
        merged = False
        for i, j in itertools.combinations(range(len(out)), 2):
            if adjacent(out[i], out[j]):
                glued = hull(out[i], out[j])
                out = [b for k, b in enumerate(out) if k not in (i, j)]
                out.insert(i, glued)
                merged = True
                break
    return _dedupe(out)


def hull_delta(b1: Interval, b2: Interval) -> int:
    return interval_cardinality(hull(b1, b2)) - interval_cardinality(b1) - interval_cardinality(b2)


def budget_enforce(new_bounds: list[Interval], k: int) -> list[Interval]:
    """Shrink to at most ``k`` intervals by hull-merging the cheapest pair.

    Ties go to the lexicographically smallest pair of serialized intervals.
    The covered point set can only grow.
    """
    if k < 1:
        raise UsageError("budget K must be at least 1")
    out = _dedupe(new_bounds)
    while len(out) > k:
        keys = [interval_key(b) for b in out]
        best = min(
            itertools.combinations(range(len(out)), 2),
            key=lambda ij: (hull_delta(out[ij[0]], out[ij[1]]), *sorted((keys[ij[0]], keys[ij[1]]))),
        )
        i, j = best
        glued = hull(out[i], out[j])
        out = [b for n, b in enumerate(out) if n not in (i, j)]
        out.insert(i, glued)
        out = _dedupe(out)
    return out


def _dedupe(bounds: list[Interval]) -> list[Interval]:
    return list(dict.fromkeys(bounds))


@dataclass
class _Expansion:
    """Result of processing one active interval (pure, parallelizable)."""

    parent: Interval
    keep: list[Interval]
    ir_calls: int
    singleton: bool = False
    stalled: bool = False


class _Search:
    def __init__(self, op: OperatorSpec, b_init: Interval, cfg: BnbConfig):
        if not b_init.valid:
            raise UsageError("the initial bound must be valid")
        self.op = op
        self.cfg = cfg
        self.b_init = b_init
        self.state = SearchState([], [], [], 0, 0)
        self._seen_fixed: set = set()
        self.done = False

    # -- helpers ---------------------------------------------------------------

    def is_fixed(self, x) -> bool:
        return self.op.apply(x) == x

    def note_fixed_endpoints(self, b: Interval) -> None:
        for x in (b.lo, b.hi) if b.lo != b.hi else (b.lo,):
            if x not in self._seen_fixed and self.is_fixed(x):
                self._seen_fixed.add(x)
                self.state.fixed_points_found.append(x)
                if self.cfg.stop_mode == FIRST:
                    self.done = True

    def finalize(self, b: Interval, stalled: bool = False) -> None:
        if b.is_singleton and self.cfg.discard_non_fixed and not self.is_fixed(b.lo):
            return
        if b not in self.state.final:
            self.state.final.append(b)
        if stalled:
            self.state.stalled.append(b)

    def split_and_refine(self, b: Interval) -> _Expansion:
        b1, b2 = decompose(b, self.cfg.decompose_policy)
        if b1 == b or b2 == b:
            return _Expansion(b, [], 0, singleton=True)
        calls = 0
        exp = None
        choices = [None]
        if self.cfg.resplit_on_stall:
            free = b.hi.bits & ~b.lo.bits
            first = self.cfg.decompose_policy(b)
            choices = [first] + [i for i in range(free.bit_length()) if free >> i & 1 and i != first]
        for atom in choices:
            if atom is not None:
                b1, b2 = decompose(b, lambda _b, a=atom: a)
            keep = []
            for half in (b1, b2):
                res = phi_check(self.op, half, self.cfg.ir_config)
                calls += 1
                if res.sound_so_far:
                    keep.append(res.outcome.result)
            if len(keep) == 2 and adjacent(keep[0], keep[1]):
                keep = [hull(keep[0], keep[1])]
            exp = _Expansion(b, keep, calls, stalled=keep == [b])
            if not exp.stalled:
                break
        return exp

    # -- main loop -------------------------------------------------------------

    def start(self) -> None:
        res = phi_check(self.op, self.b_init, self.cfg.ir_config)
        self.state.ir_calls = 1
        if not res.sound_so_far:
            self.state.converged = True
            return
        root = res.outcome.result
        self.state.root = root
        self.note_fixed_endpoints(root)
        self.admit([root], target=self.state.bounds)

    def admit(self, keep: list[Interval], target: list[Interval]) -> None:
        # Singletons would be finalized by the split guard one iteration later;
        # doing it now leaves Final identical and saves that iteration.
        for b in keep:
            if b.is_singleton:
                self.finalize(b)
            elif b not in target:
                target.append(b)
                if self.cfg.budget is not None and len(target) > self.cfg.budget:
                    target[:] = budget_enforce(target, self.cfg.budget)

    def expansions(self, bounds: list[Interval]) -> Iterator[_Expansion]:
        if self.cfg.workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(self.cfg.workers) as pool:
                yield from pool.map(self.split_and_refine, bounds)
        else:
            for b in bounds:
                yield self.split_and_refine(b)

    def outer_iteration(self) -> None:
        st = self.state
        new_bounds: list[Interval] = []
        todo = list(st.bounds)
        for n, exp in enumerate(self.expansions(todo)):
            st.ir_calls += exp.ir_calls
            if exp.singleton:
                self.finalize(exp.parent)
                continue
            for b in exp.keep:
                self.note_fixed_endpoints(b)
            if exp.stalled:
                self.finalize(exp.parent, stalled=True)
            else:
                self.admit(exp.keep, target=new_bounds)
            if self.done:
                # Keep the unprocessed intervals active so coverage still holds.
                rest = [b for b in todo[n + 1 :] if b not in new_bounds]
                new_bounds.extend(rest)
                break
        st.bounds = new_bounds
        st.outer_iterations += 1

    def check(self) -> None:
        st, cfg = self.state, self.cfg
        root = st.root
        for b in st.bounds + st.final:
            if not b.valid:
                raise InvariantError(f"invalid interval {b!r} in search state")
            if root is not None and not b.within(root):
                raise InvariantError(f"{b!r} escapes IR(B_I) = {root!r}")
        for x in st.fixed_points_found:
            if not self.is_fixed(x):
                raise InvariantError(f"recorded point {x!r} is not a fixed point")
        if cfg.budget is None:
            if root is not None and st.outer_iterations > interval_height(self.b_init):
                raise InvariantError("outer iterations exceed the height of B_I")
            if root is not None:
                total = sum(interval_cardinality(b) for b in st.bounds + st.final)
                if total > interval_cardinality(root):
                    raise InvariantError("cardinality sum exceeds |IR(B_I)|")
        else:
            if len(st.bounds) > cfg.budget:
                raise InvariantError("active set exceeds the budget")
            if not cfg.resplit_on_stall and st.ir_calls > 2 * cfg.budget * st.outer_iterations + 1:
                raise InvariantError("IR call count exceeds 2KT+1")

    def run(self) -> Iterator[SearchState]:
        self.start()
        self.state.converged = not self.state.bounds
        if self.cfg.check_invariants:
            self.check()
        yield self.state.snapshot()
        cap = self.cfg.outer_cap
        while self.state.bounds and not self.done and (cap is None or self.state.outer_iterations < cap):
            self.outer_iteration()
            if self.cfg.check_invariants:
                self.check()
            self.state.converged = not self.state.bounds
            yield self.state.snapshot()
        self.state.converged = not self.state.bounds


def bnb_steps(op: OperatorSpec, b_init: Interval, cfg: BnbConfig = BnbConfig()) -> Iterator[SearchState]:
    """Yield the search state after initialization and after every outer iteration."""
    return _Search(op, b_init, cfg).run()


def bnb_run(op: OperatorSpec, b_init: Interval, cfg: BnbConfig = BnbConfig()) -> SearchState:
    state = None
    for state in bnb_steps(op, b_init, cfg):
        pass
    return state
