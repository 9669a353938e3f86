"""Explicit-state verification workbench for Peterson's leader election on
unidirectional asynchronous rings."""

__version__ = "0.1.0"

from .kernel import BACKEND
from .protocol import (
    GlobalState,
    IsLeader,
    LocalState,
    Mode,
    ModeIs,
    Outcome,
    Pc,
    Quiescent,
    StepResult,
    Variant,
    VidEquals,
    atom_eval,
    canonical_encode,
    decode,
    initial_state,
    leader_set,
    step,
    successors,
)
from .statespace import ExploreLimits, ExploreStats, StateGraph, explore, find_trace_to, quiescent_states
