"""Brute-force stable-model enumeration, used as ground truth in tests.

``S_P(M)`` only looks at ``M ∩ N`` where ``N`` is the set of atoms that occur
under negation.  So it suffices to guess ``G ⊆ N``, compute ``M = S_P(G)``
and keep ``M`` when ``M ∩ N = G``.  Atoms all of whose rules block
themselves (``a :- ..., not a``), or that head no rule, are false in every
stable model and are never guessed; this keeps constraint atoms out of the
guess space.  Every candidate is re-verified with
:func:`is_stable_model`.  The guess loop is vectorized with numpy when the
universe fits in 63 bits.
"""

from __future__ import annotations

import numpy as np

from ..errors import ResourceCapError
from ..lattice import AtomSet, submasks
from .program import GroundProgram, is_stable_model, sp_bits

DEFAULT_ORACLE_CAP = 1 << 24
_CHUNK = 1 << 14


def brute_force_stable_models(program: GroundProgram, cap: int = DEFAULT_ORACLE_CAP) -> list[AtomSet]:
    """All stable models, sorted by bitmask.  ``cap`` bounds ``2^|N|``."""
    u = program.universe
    neg = program.negative_atoms
    guess = neg.bits & ~_never_true(program)
    k = bin(guess).count("1")
    if 1 << k > cap:
        raise ResourceCapError(f"oracle would enumerate 2^{k} guesses, cap is {cap}")
    if len(u) <= 63 and k >= 10:
        found = _numpy_candidates(program, u.from_bits(guess).indices(), neg.bits)
    else:
        found = []
        for g in submasks(guess):
            m = sp_bits(program, g)
            if m & neg.bits == g:
                found.append(m)
    models = [AtomSet(u, m) for m in sorted(set(found))]
    return [m for m in models if is_stable_model(program, m)]


def _never_true(program: GroundProgram) -> int:
    supported = 0
    for h, _, n in program.compiled:
        if not h & n:
            supported |= h
    return program.universe.full_bits & ~supported


def naive_stable_models(program: GroundProgram, cap: int = 1 << 16) -> list[AtomSet]:
    """Check every subset of the universe; independent cross-check of the fast path."""
    u = program.universe
    if 1 << len(u) > cap:
        raise ResourceCapError(f"naive oracle would enumerate 2^{len(u)} sets, cap is {cap}")
    return [AtomSet(u, m) for m in range(1 << len(u)) if sp_bits(program, m) == m]


def _numpy_candidates(program: GroundProgram, positions: list[int], neg_bits: int) -> list[int]:
    rules = program.compiled
    heads = np.array([h for h, _, _ in rules], dtype=np.uint64)
    pos = np.array([p for _, p, _ in rules], dtype=np.uint64)
    negs = np.array([n for _, _, n in rules], dtype=np.uint64)
    neg_mask = np.uint64(neg_bits)
    shifts = np.array(positions, dtype=np.uint64)
    total = 1 << len(positions)
    out: list[int] = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
        # scatter the bits of idx onto the negative-atom positions
        g = np.zeros_like(idx)
        for j, s in enumerate(shifts):
            g |= ((idx >> np.uint64(j)) & np.uint64(1)) << s
        active = (negs[None, :] & g[:, None]) == 0
        x = np.zeros_like(g)
        while True:
            fire = active & ((pos[None, :] & ~x[:, None]) == 0)
            derived = np.bitwise_or.reduce(np.where(fire, heads[None, :], np.uint64(0)), axis=1)
            nxt = x | derived
            if np.array_equal(nxt, x):
                break
            x = nxt
        keep = (x & neg_mask) == g
        out.extend(int(v) for v in x[keep])
    return out
