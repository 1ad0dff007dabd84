"""Bounding fixed points of non-monotone lattice operators by envelope refinement."""

from .bnb import BnbConfig, SearchState, bnb_run, bnb_steps, budget_enforce, merge_adjacent
from .errors import (
    AftError,
    InvariantError,
    ParseError,
    ResourceCapError,
    UnsafeVariableError,
    UnsupportedCapabilityError,
    UsageError,
)
from .lattice import AtomSet, AtomUniverse, Interval, decompose, hull, interval_cardinality
from .refine import (
    ANTIMONOTONE,
    GENERAL,
    MONOTONE,
    OperatorSpec,
    RefineConfig,
    RefineOutcome,
    envelope,
    iterate_refine,
    jump_start,
    oscillating_pair,
    phi_check,
    refine_step,
)

__version__ = "0.1.0"

__all__ = [
    "ANTIMONOTONE", "GENERAL", "MONOTONE",
    "AftError", "AtomSet", "AtomUniverse", "BnbConfig", "Interval", "InvariantError",
    "OperatorSpec", "ParseError", "RefineConfig", "RefineOutcome", "ResourceCapError",
    "SearchState", "UnsafeVariableError", "UnsupportedCapabilityError", "UsageError",
    "bnb_run", "bnb_steps", "budget_enforce", "decompose", "envelope", "hull",
    "interval_cardinality", "iterate_refine", "jump_start", "merge_adjacent",
    "oscillating_pair", "phi_check", "refine_step",
]
