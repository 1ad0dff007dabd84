"""Monotone envelopes and the interval refinement operator.

For an operator ``f`` and a bound ``B = [lo, hi]`` the refinement step is

    F(B) = [lfp(x -> lo ⊔ env_lower(B, x)), gfp(x -> hi ⊓ env_upper(B, x))]

where ``env_lower(B, x)`` is the meet of ``f`` over ``[x, hi]`` and
``env_upper(B, x)`` the join of ``f`` over ``[lo, x]``.  Both extremal fixed
points are reached by Kleene iteration started at ``lo`` and ``hi``.  An empty
range makes the envelope ``top`` (lower side) or ``bottom`` (upper side); this
is what lets an unsound bound map to an invalid interval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .errors import UnsupportedCapabilityError, UsageError
from .lattice import DEFAULT_ENUM_CAP, Interval

MONOTONE = "monotone"
ANTIMONOTONE = "antimonotone"
GENERAL = "general"
_TAGS = (MONOTONE, ANTIMONOTONE, GENERAL)

Envelope = Callable[[Interval, Any], Any]


@dataclass(frozen=True)
class OperatorSpec:
    """A lattice self-map plus the monotonicity tag that selects fast paths.

    ``lower_envelope``/``upper_envelope`` let callers supply closed forms
    ``(B, x) -> element``; they are only consulted for non-empty ranges.
    """

    apply: Callable[[Any], Any]
    lattice: Any
    monotonicity: str = GENERAL
    name: str = "f"
    lower_envelope: Optional[Envelope] = None
    upper_envelope: Optional[Envelope] = None

    def __post_init__(self):
        if self.monotonicity not in _TAGS:
            raise UsageError(f"unknown monotonicity tag {self.monotonicity!r}")

    def __call__(self, x):
        return self.apply(x)


@dataclass(frozen=True)
class RefineConfig:
    max_f_steps: Optional[int] = None
    max_kleene_steps: Optional[int] = None
    trace: bool = False
    enum_cap: int = DEFAULT_ENUM_CAP
    # One-shot formula for antimonotone operators; see refine_step.
    fast_path: bool = True

    def __post_init__(self):
        for name in ("max_f_steps", "max_kleene_steps"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"{name} must be positive")


@dataclass
class RefineOutcome:
    result: Interval
    converged: bool
    steps_used: int
    unsound_evidence: Optional[str] = None  # "invalid" | "escaped-parent"
    exact: bool = True  # False if some Kleene iteration hit its cap
    trace: list = field(default_factory=list)

    @property
    def sound_so_far(self) -> bool:
        return self.unsound_evidence is None


@dataclass
class PhiResult:
    sound_so_far: bool
    outcome: RefineOutcome

    def __bool__(self) -> bool:
        return self.sound_so_far


def envelope(op: OperatorSpec, b: Interval, x: Any, side: str, cap: int = DEFAULT_ENUM_CAP) -> Any:
    """Restricted best monotone under- (``"lower"``) or over- (``"upper"``) approximation at ``x``."""
    lat = op.lattice
    if side == "lower":
        if not lat.leq(x, b.hi):
            return lat.top
        if op.lower_envelope is not None:
            return op.lower_envelope(b, x)
        if op.monotonicity == ANTIMONOTONE:
            return op.apply(b.hi)
        if op.monotonicity == MONOTONE:
            return op.apply(x)
        acc = lat.top
        for y in _range(lat, x, b.hi, cap):
            acc = lat.meet(acc, op.apply(y))
        return acc
    if side == "upper":
        if not lat.leq(b.lo, x):
            return lat.bottom
        if op.upper_envelope is not None:
            return op.upper_envelope(b, x)
        if op.monotonicity == ANTIMONOTONE:
            return op.apply(b.lo)
        if op.monotonicity == MONOTONE:
            return op.apply(x)
        acc = lat.bottom
        for y in _range(lat, b.lo, x, cap):
            acc = lat.join(acc, op.apply(y))
        return acc
    raise UsageError(f"side must be 'lower' or 'upper', not {side!r}")


def _range(lat, lo, hi, cap):
    if not hasattr(lat, "enumerate"):
        raise UnsupportedCapabilityError(
            "general operators need an enumerable lattice or closed-form envelopes"
        )
    return lat.enumerate(lo, hi, cap)


def kleene(g: Callable[[Any], Any], start: Any, max_steps: Optional[int] = None) -> tuple[Any, bool]:
    """Iterate ``g`` from ``start`` until it stabilizes or the step cap is hit."""
    x = start
    steps = 0
    while max_steps is None or steps < max_steps:
        y = g(x)
        steps += 1
        if y == x:
            return x, True
        x = y
    return x, False


def refine_step(op: OperatorSpec, b: Interval, cfg: RefineConfig = RefineConfig()) -> tuple[Interval, bool]:
    """One application of the refinement operator.  Returns ``(F(b), exact)``.

    For antimonotone operators both envelopes are constant on their ranges, so
    one evaluation per side gives ``lo ⊔ f(hi)`` and ``hi ⊓ f(lo)``.  If the
    lower value leaves ``[.., hi]`` the next Kleene step meets an empty range
    and saturates to ``top``; dually the upper value drops to ``bottom`` once
    it no longer lies above ``lo``.  The closed form applies both rules, so it
    equals the Kleene result on every interval.
    """
    lat = op.lattice
    if (
        cfg.fast_path
        and op.monotonicity == ANTIMONOTONE
        and op.lower_envelope is None
        and op.upper_envelope is None
    ):
        return _antimonotone_step(op, b), True
    cap = cfg.enum_cap
    lo, exact_lo = kleene(
        lambda x: lat.join(b.lo, envelope(op, b, x, "lower", cap)), b.lo, cfg.max_kleene_steps
    )
    hi, exact_hi = kleene(
        lambda x: lat.meet(b.hi, envelope(op, b, x, "upper", cap)), b.hi, cfg.max_kleene_steps
    )
    return Interval(lo, hi), exact_lo and exact_hi


def _antimonotone_step(op: OperatorSpec, b: Interval) -> Interval:
    lat = op.lattice
    if not lat.leq(b.lo, b.hi):
        return Interval(lat.top, lat.bottom)
    lo = lat.join(b.lo, op.apply(b.hi))
    hi = lat.meet(b.hi, op.apply(b.lo))
    return Interval(lo if lat.leq(lo, b.hi) else lat.top, hi if lat.leq(b.lo, hi) else lat.bottom)


def _trace_line(lat, step: int, b: Interval) -> dict:
    conv = getattr(lat, "element_to_json", repr)
    return {"step": step, "lower": conv(b.lo), "upper": conv(b.hi), "valid": lat.leq(b.lo, b.hi)}


def iterate_refine(op: OperatorSpec, b: Interval, cfg: RefineConfig = RefineConfig()) -> RefineOutcome:
    """Apply the refinement step until it stabilizes, proves ``b`` unsound, or runs out of steps.

    Every intermediate bound that stays valid and inside its predecessor is
    itself sound whenever ``b`` was.
    """
    lat = op.lattice
    if not lat.leq(b.lo, b.hi):
        raise UsageError(f"cannot refine the invalid interval {b!r}")
    cur = b
    steps = 0
    exact = True
    trace = []
    while cfg.max_f_steps is None or steps < cfg.max_f_steps:
        nxt, ok = refine_step(op, cur, cfg)
        steps += 1
        exact = exact and ok
        if cfg.trace:
            trace.append(_trace_line(lat, steps, nxt))
        if not lat.leq(nxt.lo, nxt.hi):
            return RefineOutcome(nxt, False, steps, "invalid", exact, trace)
        if not (lat.leq(cur.lo, nxt.lo) and lat.leq(nxt.hi, cur.hi)):
            return RefineOutcome(nxt, False, steps, "escaped-parent", exact, trace)
        if nxt == cur:
            return RefineOutcome(cur, exact, steps, None, exact, trace)
        cur = nxt
    return RefineOutcome(cur, False, steps, None, exact, trace)


def trace_jsonl(outcome: RefineOutcome) -> str:
    return "".join(json.dumps(line) + "\n" for line in outcome.trace)


def phi_check(op: OperatorSpec, b: Interval, cfg: RefineConfig = RefineConfig()) -> PhiResult:
    """Pruning predicate: ``False`` proves ``b`` contains no fixed point.

    ``True`` carries no completeness claim.
    """
    outcome = iterate_refine(op, b, cfg)
    return PhiResult(outcome.unsound_evidence is None, outcome)


def oscillating_pair(op: OperatorSpec, max_steps: Optional[int] = None) -> tuple[Any, Any]:
    """Extreme oscillating pair ``(mu, nu)`` of an antimonotone operator.

    ``mu`` is the least fixed point of ``f∘f`` and ``nu = f(mu)``; together
    they bracket every fixed point of ``f``.
    """
    if op.monotonicity != ANTIMONOTONE:
        raise UsageError("oscillating pairs are defined for antimonotone operators")
    f = op.apply
    mu, _ = kleene(lambda x: f(f(x)), op.lattice.bottom, max_steps)
    return mu, f(mu)


def jump_start(
    op: OperatorSpec,
    current: RefineOutcome,
    injected: Interval,
    cfg: RefineConfig = RefineConfig(),
) -> RefineOutcome:
    """Resume refinement from a tighter bound the caller vouches for.

    The soundness of ``injected`` is the caller's responsibility; only
    containment in the current result is checked.
    """
    lat = op.lattice
    cur = current.result
    if not (lat.leq(cur.lo, injected.lo) and lat.leq(injected.hi, cur.hi)):
        raise UsageError(f"injected bound {injected!r} is not inside {cur!r}")
    if injected == cur:
        return current
    return iterate_refine(op, injected, cfg)
