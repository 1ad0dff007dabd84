"""Exact-rational best-response example on the unit square.

Two players respond to each other with ``BR1(x2) = 1 - x2**2`` and
``BR2(x1) = x1 / 2``; the joint map is neither monotone nor antimonotone.
Its envelopes on a bound have closed forms because the map is decreasing in
``x2`` and increasing in ``x1``: the lower envelope evaluates ``x2`` at the
bound's upper end and the upper envelope at its lower end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Union

from .errors import UsageError
from .lattice import Interval
from .refine import GENERAL, OperatorSpec, RefineConfig, refine_step

Number = Union[int, Fraction]


@dataclass(frozen=True)
class RationalPair:
    x1: Fraction
    x2: Fraction

    def __init__(self, x1: Number | str, x2: Number | str):
        a, b = Fraction(x1), Fraction(x2)
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise UsageError(f"({a}, {b}) is outside the unit square")
        object.__setattr__(self, "x1", a)
        object.__setattr__(self, "x2", b)

    def __le__(self, other: RationalPair) -> bool:
        return self.x1 <= other.x1 and self.x2 <= other.x2

    def __ge__(self, other: RationalPair) -> bool:
        return other <= self

    def __or__(self, other: RationalPair) -> RationalPair:
        return RationalPair(max(self.x1, other.x1), max(self.x2, other.x2))

    def __and__(self, other: RationalPair) -> RationalPair:
        return RationalPair(min(self.x1, other.x1), min(self.x2, other.x2))

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return (self.x1, self.x2)

    def __repr__(self) -> str:
        return f"({self.x1}, {self.x2})"


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class UnitSquare:
    """``[0,1] x [0,1]`` ordered componentwise.  No enumeration capability."""

    bottom = RationalPair(0, 0)
    top = RationalPair(1, 1)

    def leq(self, a: RationalPair, b: RationalPair) -> bool:
        return a <= b

    def join(self, a: RationalPair, b: RationalPair) -> RationalPair:
        return a | b

    def meet(self, a: RationalPair, b: RationalPair) -> RationalPair:
        return a & b

    def element_to_json(self, x: RationalPair) -> list[str]:
        return [_q(x.x1), _q(x.x2)]


SQUARE = UnitSquare()


def best_response(p: RationalPair) -> RationalPair:
    return RationalPair(1 - p.x2 * p.x2, p.x1 / 2)


def demo_operator() -> OperatorSpec:
    def lower(b: Interval, x: RationalPair) -> RationalPair:
        return best_response(RationalPair(x.x1, b.hi.x2))

    def upper(b: Interval, x: RationalPair) -> RationalPair:
        return best_response(RationalPair(x.x1, b.lo.x2))

    return OperatorSpec(best_response, SQUARE, GENERAL, "best-response", lower, upper)


# Exact fixed point (-2 + 2*sqrt(2), -1 + sqrt(2)) as floats, for containment checks
FIXED_POINT = (-2 + 2 * sqrt(2), -1 + sqrt(2))

UNSOUND_BOUND = Interval(RationalPair(0, 0), RationalPair(Fraction(1, 5), Fraction(1, 5)))


@dataclass
class DemoTrace:
    steps: list[Interval]
    unsound_input: Interval
    unsound_image: Interval
    converged: bool = False

    def to_json_lines(self) -> str:
        lines = []
        for k, b in enumerate(self.steps):
            lines.append({"step": k, "lower": SQUARE.element_to_json(b.lo),
                          "upper": SQUARE.element_to_json(b.hi), "valid": b.lo <= b.hi})
        lines.append({"step": "unsound-check",
                      "input": [SQUARE.element_to_json(self.unsound_input.lo),
                                SQUARE.element_to_json(self.unsound_input.hi)],
                      "lower": SQUARE.element_to_json(self.unsound_image.lo),
                      "upper": SQUARE.element_to_json(self.unsound_image.hi),
                      "valid": self.unsound_image.lo <= self.unsound_image.hi})
        lines.append({"converged": self.converged})
        return "".join(json.dumps(ln) + "\n" for ln in lines)


def run_demo(max_f_steps: int = 2, max_kleene_steps: int = 64) -> DemoTrace:
    """Refine ``[(0,0), (1,1)]`` for ``max_f_steps`` steps, then check the unsound bound.

    ``steps[0]`` is the starting bound.  The chain never stabilizes in
    finitely many exact steps, so ``converged`` stays false unless an exact
    repeat happens.
    """
    if max_f_steps < 2:
        raise UsageError("run_demo needs at least two refinement steps")
    op = demo_operator()
    cfg = RefineConfig(max_kleene_steps=max_kleene_steps)
    cur = Interval(SQUARE.bottom, SQUARE.top)
    steps = [cur]
    converged = False
    for _ in range(max_f_steps):
        nxt, _exact = refine_step(op, cur, cfg)
        steps.append(nxt)
        if nxt == cur:
            converged = True
            break
        cur = nxt
    image, _ = refine_step(op, UNSOUND_BOUND, cfg)
    return DemoTrace(steps, UNSOUND_BOUND, image, converged)


def contains_fixed_point(b: Interval, slack: float = 1e-12) -> bool:
    x1, x2 = FIXED_POINT
    return (
        float(b.lo.x1) - slack <= x1 <= float(b.hi.x1) + slack
        and float(b.lo.x2) - slack <= x2 <= float(b.hi.x2) + slack
    )
