"""Seeded random instances: ground programs, operators, partitions, mini-IR programs."""

from __future__ import annotations

import random
from typing import Optional

from .abstraction import Partition
from .asp.program import GroundProgram
from .lattice import AtomSet, AtomUniverse, Interval
from .refine import ANTIMONOTONE, GENERAL, MONOTONE, OperatorSpec
from .specanalysis import signs
from .specanalysis.ir import Assign, Assumption, Block, Branch, Goto, MiniProgram


def random_ground_program(
    rng: random.Random,
    max_atoms: int = 10,
    max_rules: int = 25,
    neg_prob: float = 0.5,
    constraint_prob: float = 0.1,
) -> GroundProgram:
    """Normal program over ``a0..a{n-1}``; some rules are constraints (hidden heads).

    Hidden constraint atoms count toward ``max_atoms``.
    """
    n = rng.randint(1, max_atoms)
    atoms = [f"a{i}" for i in range(n)]
    rules = []
    hidden = []
    for _ in range(rng.randint(0, max_rules)):
        pos = rng.sample(atoms, min(n, rng.choice([0, 0, 1, 1, 2])))
        neg = rng.sample(atoms, min(n, rng.choice([0, 1, 1, 2]))) if rng.random() < neg_prob else []
        if rng.random() < constraint_prob and (pos or neg) and n + len(hidden) < max_atoms:
            head = f"_c{len(hidden)}"
            hidden.append(head)
            rules.append((head, pos, neg + [head]))
        else:
            rules.append((rng.choice(atoms), pos, neg))
    return GroundProgram.from_rules(rules, hidden, atoms=atoms + hidden)


def program_corpus(seed: int = 0, count: int = 200, **kw) -> list[GroundProgram]:
    rng = random.Random(seed)
    return [random_ground_program(rng, **kw) for _ in range(count)]


def random_universe(rng: random.Random, max_atoms: int = 8, min_atoms: int = 1) -> AtomUniverse:
    return AtomUniverse(f"x{i}" for i in range(rng.randint(min_atoms, max_atoms)))


def random_set(rng: random.Random, u: AtomUniverse) -> AtomSet:
    return AtomSet(u, rng.getrandbits(len(u)) if len(u) else 0)


def random_interval(rng: random.Random, u: AtomUniverse, within: Optional[Interval] = None) -> Interval:
    """A valid interval, optionally inside ``within``."""
    lo_bits, hi_bits = (0, u.full_bits) if within is None else (within.lo.bits, within.hi.bits)
    free = hi_bits & ~lo_bits
    a = rng.getrandbits(max(1, len(u))) & free
    b = rng.getrandbits(max(1, len(u))) & free
    return Interval(AtomSet(u, lo_bits | (a & b)), AtomSet(u, lo_bits | a | b))


def _monotone_parts(rng: random.Random, u: AtomUniverse) -> tuple[int, list[int]]:
    const = random_set(rng, u).bits & random_set(rng, u).bits
    images = [random_set(rng, u).bits & random_set(rng, u).bits for _ in range(len(u))]
    return const, images


def _union_image(const: int, images: list[int], x: int) -> int:
    out, i = const, 0
    while x:
        if x & 1:
            out |= images[i]
        x >>= 1
        i += 1
    return out


def random_monotone_op(rng: random.Random, u: AtomUniverse) -> OperatorSpec:
    const, images = _monotone_parts(rng, u)
    return OperatorSpec(lambda x: AtomSet(u, _union_image(const, images, x.bits)), u, MONOTONE, "g")


def random_antimonotone_op(rng: random.Random, u: AtomUniverse) -> OperatorSpec:
    """``f(x) = top - g(x)`` with ``g`` a random join-preserving map."""
    const, images = _monotone_parts(rng, u)
    full = u.full_bits
    return OperatorSpec(
        lambda x: AtomSet(u, full & ~_union_image(const, images, x.bits)), u, ANTIMONOTONE, "f"
    )


def random_general_op(rng: random.Random, u: AtomUniverse, fixed_points: int = 1) -> OperatorSpec:
    """A random lookup table, with a few planted fixed points."""
    table = [rng.getrandbits(max(1, len(u))) & u.full_bits for _ in range(1 << len(u))]
    for _ in range(fixed_points):
        x = rng.randrange(1 << len(u))
        table[x] = x
    return OperatorSpec(lambda x: AtomSet(u, table[x.bits]), u, GENERAL, "h")


def random_partition(rng: random.Random, u: AtomUniverse) -> Partition:
    if not len(u):
        return Partition(u, ())
    order = list(range(len(u)))
    rng.shuffle(order)
    k = rng.randint(1, len(u))
    cuts = sorted(rng.sample(range(1, len(u)), k - 1)) if k > 1 else []
    groups, prev = [], 0
    for c in cuts + [len(u)]:
        groups.append(order[prev:c])
        prev = c
    return Partition(u, tuple(u.set(g) for g in groups))


def random_mini_program(
    rng: random.Random, max_vars: int = 3, max_blocks: int = 5, max_assumptions: int = 12
) -> MiniProgram:
    nv = rng.randint(1, max_vars)
    nb = rng.randint(2, max_blocks)
    vs = [f"v{i}" for i in range(nv)]
    names = [f"L{i}" for i in range(nb)]

    def operand():
        return rng.choice(vs) if rng.random() < 0.6 else rng.randint(-2, 2)

    blocks = []
    for i, name in enumerate(names):
        stmts = []
        for _ in range(rng.randint(0, 2)):
            kind = rng.choice(["const", "copy", "+", "*", "neg"])
            t = rng.choice(vs)
            if kind == "const":
                stmts.append(Assign(t, "const", (rng.randint(-2, 2),)))
            elif kind == "copy":
                stmts.append(Assign(t, "copy", (rng.choice(vs),)))
            elif kind == "neg":
                stmts.append(Assign(t, "neg", (rng.choice(vs),)))
            else:
                stmts.append(Assign(t, kind, (operand(), operand())))
        r = rng.random()
        targets = names[1:]
        if i == nb - 1 and r < 0.5:
            term = None
        elif r < 0.35:
            term = Goto(rng.choice(targets))
        elif r < 0.9:
            term = Branch(rng.choice(vs), rng.choice(list(signs.GUARDS)), rng.choice(targets), rng.choice(targets))
        else:
            term = None
        blocks.append(Block(name, tuple(stmts), term))
    pool = [(loc, v, s) for loc in names for v in vs for s in (signs.NEG, signs.ZERO, signs.POS)]
    picks = rng.sample(pool, min(len(pool), rng.randint(0, max_assumptions)))
    return MiniProgram(tuple(vs), tuple(blocks), tuple(Assumption(*a) for a in picks))
