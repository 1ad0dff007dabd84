"""Speculative sign analysis over a mini IR and its stable assumption sets."""

from .analysis import (
    FALSE,
    MAY,
    PROVED,
    TRUE,
    UNKNOWN,
    StableAssumptionReport,
    analyze,
    analyze_kleene,
    brute_force_stable_sets,
    ok,
    ok_and_safe,
    phi_operator,
    project,
    stable_assumption_sets,
    state_to_json,
    transfer,
)
from .ir import Assign, Assumption, Block, Branch, Goto, MiniProgram, format_mini, parse_mini

__all__ = [
    "FALSE", "MAY", "PROVED", "TRUE", "UNKNOWN",
    "Assign", "Assumption", "Block", "Branch", "Goto", "MiniProgram",
    "StableAssumptionReport", "analyze", "analyze_kleene", "brute_force_stable_sets",
    "format_mini", "ok", "ok_and_safe", "parse_mini", "phi_operator", "project",
    "stable_assumption_sets", "state_to_json", "transfer",
]
