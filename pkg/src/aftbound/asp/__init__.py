"""Ground answer-set programs: parsing, grounding, stable-model bounds, pre-processing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..bnb import BnbConfig, SearchState, bnb_run
from ..lattice import AtomSet, Interval
from .grounder import DEFAULT_GROUND_CAP, ground
from .oracle import brute_force_stable_models, naive_stable_models
from .preprocess import (
    SAFE,
    SUBSTITUTE,
    PartialEvaluation,
    bound_from_json,
    compose_partial_eval,
    emit_assumptions,
    partial_eval,
    project_models,
)
from .program import (
    GroundProgram,
    GroundRule,
    format_program,
    gl_operator,
    gl_reduct,
    is_stable_model,
    minimal_model,
    well_founded_bound,
)
from .syntax import NonGroundProgram, parse_program


@dataclass
class StableModelReport:
    models: list[AtomSet]
    well_founded: Interval
    search: Optional[SearchState]


def load_program(text: str, cap: int = DEFAULT_GROUND_CAP) -> GroundProgram:
    return ground(parse_program(text), cap)


def stable_model_bounds(program: GroundProgram, cfg: Optional[BnbConfig] = None) -> StableModelReport:
    """Well-founded bound, and with ``cfg`` the branch-and-bound refinement of it.

    ``models`` lists the stable models certified by the search (fixed points
    found at interval endpoints or as singleton final intervals).
    """
    wf = well_founded_bound(program)
    if cfg is None:
        return StableModelReport([], wf, None)
    op = gl_operator(program)
    u = program.universe
    state = bnb_run(op, Interval(u.bottom, u.top), cfg)
    models = sorted(set(state.fixed_points_found), key=lambda m: m.bits)
    return StableModelReport(models, wf, state)


__all__ = [
    "SAFE",
    "SUBSTITUTE",
    "GroundProgram",
    "GroundRule",
    "NonGroundProgram",
    "PartialEvaluation",
    "StableModelReport",
    "bound_from_json",
    "brute_force_stable_models",
    "compose_partial_eval",
    "emit_assumptions",
    "format_program",
    "gl_operator",
    "gl_reduct",
    "ground",
    "is_stable_model",
    "load_program",
    "minimal_model",
    "naive_stable_models",
    "parse_program",
    "partial_eval",
    "project_models",
    "stable_model_bounds",
    "well_founded_bound",
]
