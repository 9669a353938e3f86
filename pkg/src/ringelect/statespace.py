"""Exhaustive breadth-first exploration of the reachable state graph."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import _layout as L
from . import kernel
from .errors import IndexOutOfRange, StateLimitExceeded, TruncatedGraph
from .graph import LabeledGraph, Trace, finite_trace
from .protocol import (
    GlobalState,
    IsLeader,
    ModeIs,
    Quiescent,
    Variant,
    VidEquals,
    canonical_encode,
    decode,
    initial_state,
)


@dataclass(frozen=True)
class ExploreLimits:
    max_states: int = 10**7
    max_steps_per_trace: int = 10**6

    def __post_init__(self):
        if self.max_states < 1 or self.max_steps_per_trace < 1:
            raise ValueError("exploration limits must be positive")


@dataclass(frozen=True)
class ExploreStats:
    reachable_states: int
    transitions: int
    self_loops: int
    quiescent_nonleader: int
    peak_frontier: int

    def to_dict(self, graph: "StateGraph") -> dict:
        d = {"variant": graph.variant.value, "n": graph.n, "uids": list(graph.uids)}
        d.update(asdict(self))
        return d


class StateGraph(LabeledGraph):
    """Reachable states of one protocol instance.

    ``succ[s, i]`` is the state reached when process ``i`` runs in state
    ``s``; a stutter is ``succ[s, i] == s``.  State 0 is the initial state.
    Rows of states left unexpanded by a truncated exploration hold ``-1``.
    """

    def __init__(self, variant: Variant, uids: Sequence[int], codes: Sequence[bytes], succ: np.ndarray,
                 error_state: Optional[int] = None, truncated: bool = False, clear_temps: bool = True):
        self.variant = variant
        self.uids = tuple(uids)
        self.n = len(self.uids)
        self.clear_temps = clear_temps
        self.truncated = truncated
        self.error_state = error_state
        self.succ = np.asarray(succ, dtype=np.int64).reshape(len(codes), self.n)
        self._codes = list(codes)
        width = L.state_width(variant.code, self.n)
        self.codes = np.frombuffer(b"".join(self._codes), dtype=np.uint8).reshape(len(codes), width)
        expanded = self.succ[:, 0] >= 0
        src = np.repeat(np.flatnonzero(expanded), self.n)
        label = np.tile(np.arange(self.n), int(expanded.sum()))
        dst = self.succ[expanded].ravel()
        super().__init__(len(codes), self.n, src, label, dst)

    @property
    def overflow_reached(self) -> bool:
        return self.error_state is not None

    def require_complete(self) -> None:
        if self.truncated:
            raise TruncatedGraph("the state graph was truncated by the exploration limit")

    def encoded(self, sid: int) -> bytes:
        return self._codes[sid]

    def state(self, sid: int) -> Optional[GlobalState]:
        """Decoded state ``sid``; ``None`` for the overflow error state."""
        if sid == self.error_state:
            return None
        return decode(self.variant, self._codes[sid])

    def states(self):
        for sid in range(self.num_states):
            yield sid, self.state(sid)

    @cached_property
    def _index(self) -> dict:
        return {c: i for i, c in enumerate(self._codes)}

    def index_of(self, g: GlobalState) -> Optional[int]:
        return self._index.get(canonical_encode(self.variant, g))

    def _field(self, node: int, f: int) -> np.ndarray:
        if not 0 <= node < self.n:
            raise IndexOutOfRange(f"node {node} outside [0, {self.n - 1}]")
        rec = L.record_width(self.variant.code, self.n)
        return self.codes[:, 1 + node * rec + f]

    def atom_mask(self, atom) -> np.ndarray:
        if isinstance(atom, IsLeader):
            return self._field(atom.node, L.F_PC) == L.PC_LEAD
        if isinstance(atom, VidEquals):
            return self._field(atom.node, L.F_VID) == atom.value
        if isinstance(atom, ModeIs):
            return self._field(atom.node, L.F_MODE) == int(atom.mode)
        if isinstance(atom, Quiescent):
            return (self.succ == np.arange(self.num_states)[:, None]).all(axis=1)
        return super().atom_mask(atom)

    def leader_counts(self) -> np.ndarray:
        rec = L.record_width(self.variant.code, self.n)
        pcs = self.codes[:, 1 + L.F_PC::rec][:, : self.n]
        return (pcs == L.PC_LEAD).sum(axis=1)

    def leader_mask(self) -> np.ndarray:
        return self.leader_counts() > 0


def compute_stats(graph: StateGraph, peak_frontier: int) -> ExploreStats:
    rows = graph.succ[graph.succ[:, 0] >= 0]
    ids = np.flatnonzero(graph.succ[:, 0] >= 0)
    loops = rows == ids[:, None]
    quiet = loops.all(axis=1)
    leaders = graph.leader_mask()[ids]
    return ExploreStats(
        reachable_states=graph.num_states,
        transitions=int((~loops).sum()),
        self_loops=int(loops.sum()),
        quiescent_nonleader=int((quiet & ~leaders).sum()),
        peak_frontier=int(peak_frontier),
    )


def explore(variant: Variant, uids: Sequence[int], limits: Optional[ExploreLimits] = None,
            clear_temps: bool = True, backend: Optional[str] = None):
    """BFS over the reachable states; returns ``(graph, stats)``.

    State ids follow discovery order with processes tried in label order, so
    the graph is identical across runs.  Raises :class:`StateLimitExceeded`
    carrying the partial graph when ``limits.max_states`` is reached.
    """
    limits = limits or ExploreLimits()
    init = canonical_encode(variant, initial_state(variant, uids))
    n = len(uids)
    impl = kernel.backend(backend) if backend else kernel
    codes, edges, error_id, truncated, peak = impl.explore(variant.code, n, clear_temps, init, limits.max_states)
    succ = np.full((len(codes), n), -1, dtype=np.int64)
    flat = np.frombuffer(edges, dtype=np.int32) if len(edges) else np.empty(0, np.int32)
    succ.ravel()[: len(flat)] = flat
    graph = StateGraph(variant, uids, codes, succ, None if error_id < 0 else error_id, truncated, clear_temps)
    stats = compute_stats(graph, peak)
    if truncated:
        raise StateLimitExceeded(graph, stats)
    return graph, stats


Target = Union[Callable[[GlobalState], bool], np.ndarray]


def _target_mask(graph: StateGraph, target: Target) -> np.ndarray:
    if isinstance(target, np.ndarray):
        return target.astype(bool)
    mask = np.zeros(graph.num_states, dtype=bool)
    for sid, g in graph.states():
        mask[sid] = g is not None and bool(target(g))
    return mask


def find_trace_to(graph: StateGraph, target: Target, limits: Optional[ExploreLimits] = None) -> Optional[Trace]:
    """Shortest path from the initial state to a state satisfying ``target``.

    ``target`` is a predicate over decoded states or a boolean state mask.
    Returns ``None`` when no reachable state qualifies (or none within
    ``limits.max_steps_per_trace`` edges).
    """
    graph.require_complete()
    limits = limits or ExploreLimits()
    return finite_trace(graph, graph.initial, _target_mask(graph, target), max_edges=limits.max_steps_per_trace)


class QuiescentStates(NamedTuple):
    with_leader: list
    without_leader: list

    @property
    def all(self) -> list:
        return sorted(self.with_leader + self.without_leader)


def quiescent_states(graph: LabeledGraph) -> QuiescentStates:
    """States whose every outgoing edge is a self-loop, split by leader."""
    graph.require_complete()
    quiet = graph.self_loop_only()
    leaders = graph.leader_mask()
    return QuiescentStates(
        with_leader=np.flatnonzero(quiet & leaders).tolist(),
        without_leader=np.flatnonzero(quiet & ~leaders).tolist(),
    )
