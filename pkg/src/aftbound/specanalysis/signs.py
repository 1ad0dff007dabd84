"""Five-point sign lattice ``bot < {-, 0, +} < top`` encoded as bitmasks.

A sign is the set of possible signs of a value: bit 0 is negative, bit 1 is
zero, bit 2 is positive.  Only the five sets below are lattice elements;
:func:`abstract` maps any set to the least element above it.
"""

from __future__ import annotations

BOT, NEG, ZERO, POS, TOP = 0, 1, 2, 4, 7
SIGNS = (BOT, NEG, ZERO, POS, TOP)
ATOMS = (NEG, ZERO, POS)

_NAMES = {BOT: "bot", NEG: "-", ZERO: "0", POS: "+", TOP: "top"}
_PARSE = {"-": NEG, "0": ZERO, "+": POS}


def abstract(mask: int) -> int:
    if mask in (BOT, NEG, ZERO, POS):
        return mask
    return TOP


def name(s: int) -> str:
    return _NAMES[s]


def parse_sign(text: str) -> int:
    """Parse an assumption sign: ``-``, ``0`` or ``+``."""
    return _PARSE[text]


def leq(a: int, b: int) -> bool:
    return a & ~b == 0


def join(a: int, b: int) -> int:
    return abstract(a | b)


def meet(a: int, b: int) -> int:
    return a & b


def of_const(c: int) -> int:
    return NEG if c < 0 else ZERO if c == 0 else POS


# exact sign sets for one sign on each side
_ADD = {
    (NEG, NEG): NEG, (NEG, ZERO): NEG, (NEG, POS): TOP,
    (ZERO, NEG): NEG, (ZERO, ZERO): ZERO, (ZERO, POS): POS,
    (POS, NEG): TOP, (POS, ZERO): POS, (POS, POS): POS,
}
_MUL = {
    (NEG, NEG): POS, (NEG, ZERO): ZERO, (NEG, POS): NEG,
    (ZERO, NEG): ZERO, (ZERO, ZERO): ZERO, (ZERO, POS): ZERO,
    (POS, NEG): NEG, (POS, ZERO): ZERO, (POS, POS): POS,
}


def _lift(table: dict, a: int, b: int) -> int:
    out = 0
    for x in ATOMS:
        if a & x:
            for y in ATOMS:
                if b & y:
                    out |= table[x, y]
    return abstract(out)


def add(a: int, b: int) -> int:
    return _lift(_ADD, a, b)


def mul(a: int, b: int) -> int:
    return _lift(_MUL, a, b)


def negate(a: int) -> int:
    return (a & ZERO) | (NEG if a & POS else 0) | (POS if a & NEG else 0)


# values of v satisfying "v <cmp> 0"
GUARDS = {
    "<": NEG,
    "<=": NEG | ZERO,
    ">": POS,
    ">=": ZERO | POS,
    "=": ZERO,
    "!=": NEG | POS,
}


def refine(a: int, cmp: str, taken: bool) -> int:
    """Sign of ``v`` on the edge where ``v <cmp> 0`` is ``taken`` (or not)."""
    allowed = GUARDS[cmp] if taken else TOP & ~GUARDS[cmp]
    return abstract(a & allowed)
