"""Instantiation of safe non-ground programs.

Rather than substituting every constant for every variable, rule bodies are
matched against the atoms that could possibly be derived (a fixpoint that
ignores negation).  Instances whose positive body mentions an underivable
atom can never fire, so leaving them out preserves stable models.
Comparison literals are evaluated as soon as their variables are bound.
"""

from __future__ import annotations

from typing import Iterator

from ..errors import ResourceCapError
from .program import GroundProgram
from .syntax import Atom, Comparison, NonGroundProgram, Rule, Var, atom_name, compare, iter_ground_args

DEFAULT_GROUND_CAP = 10**6

GroundAtom = tuple  # (pred, args)


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.cap:
            raise ResourceCapError(f"grounding explored more than {self.cap} matches")


def _subst(t, env: dict):
    return env[t.name] if isinstance(t, Var) else t


def _instantiate(a: Atom, env: dict) -> GroundAtom:
    return (a.pred, tuple(_subst(t, env) for t in a.args))


def _unify(pattern: tuple, args: tuple, env: dict) -> dict | None:
    if len(pattern) != len(args):
        return None
    out = env
    for p, v in zip(pattern, args):
        if isinstance(p, Var):
            bound = out.get(p.name, _MISSING)
            if bound is _MISSING:
                if out is env:
                    out = dict(env)
                out[p.name] = v
            elif bound != v:
                return None
        elif p != v:
            return None
    return out


_MISSING = object()


def _matches(rule: Rule, index: dict[str, list], budget: _Budget) -> Iterator[dict]:
    positives = rule.positive
    comparisons = rule.comparisons
    # comparison i becomes checkable right after positive literal stage[i]
    seen: set[str] = set()
    stage = {}
    for k, a in enumerate(positives):
        seen |= a.variables()
        for i, c in enumerate(comparisons):
            if i not in stage and c.variables() <= seen:
                stage[i] = k
    for i, c in enumerate(comparisons):
        stage.setdefault(i, -1)  # variable-free comparison
    checks: list[list[Comparison]] = [[] for _ in range(len(positives) + 1)]
    for i, c in enumerate(comparisons):
        checks[stage[i] + 1].append(c)

    def ok(env: dict, cs: list[Comparison]) -> bool:
        return all(compare(c.op, _subst(c.left, env), _subst(c.right, env)) for c in cs)

    def go(k: int, env: dict) -> Iterator[dict]:
        if k == len(positives):
            yield env
            return
        a = positives[k]
        rows = index.get(a.pred, ())
        for n in range(len(rows)):  # rows may grow during the fixpoint pass
            budget.spend()
            env2 = _unify(a.args, rows[n], env)
            if env2 is not None and ok(env2, checks[k + 1]):
                yield from go(k + 1, env2)

    if ok({}, checks[0]):
        yield from go(0, {})


def ground(program: NonGroundProgram, cap: int = DEFAULT_GROUND_CAP) -> GroundProgram:
    """Ground ``program``; constraints get one hidden head ``_c<k>`` each."""
    budget = _Budget(cap)
    possible: dict[GroundAtom, None] = {}
    index: dict[str, list] = {}

    def add(ga: GroundAtom) -> bool:
        if ga in possible:
            return False
        possible[ga] = None
        index.setdefault(ga[0], []).append(ga[1])
        return True

    facts, rules = [], []
    for r in program.rules:
        (facts if not r.body else rules).append(r)
    for r in facts:
        for args in iter_ground_args(r.head.args):
            budget.spend()
            add((r.head.pred, args))

    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.head is None:
                continue
            for env in _matches(r, index, budget):
                changed |= add(_instantiate(r.head, env))

    out: list[tuple[str, list[str], list[str]]] = []
    hidden = []
    constraint_no = 0
    for r in program.rules:
        if not r.body:
            for args in iter_ground_args(r.head.args):
                out.append((atom_name(r.head.pred, args), [], []))
            continue
        if r.head is None:
            constraint_no += 1
            head = f"_c{constraint_no}"
        for env in _matches(r, index, budget):
            pos = [atom_name(*_instantiate(a, env)) for a in r.positive]
            neg = [atom_name(*_instantiate(a, env)) for a in r.negative]
            if r.head is None:
                if head not in hidden:
                    hidden.append(head)
                out.append((head, pos, neg + [head]))
            else:
                out.append((atom_name(*_instantiate(r.head, env)), pos, neg))
    return GroundProgram.from_rules(out, hidden)
