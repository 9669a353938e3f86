"""Edge-labeled transition graphs and the set algorithms the checker uses.

A :class:`LabeledGraph` is a finite multigraph whose edges carry a process
label in ``[0, num_labels)``.  State sets are boolean numpy masks.  Every
routine here is linear in the number of edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


@dataclass(frozen=True)
class Prop:
    """A named proposition looked up in ``LabeledGraph.props``."""

    name: str

    def __str__(self):
        return self.name


@dataclass
class Trace:
    """A path through a graph.

    ``steps`` is a list of ``(state_id, label)`` pairs where ``label`` is the
    process that fires out of ``state_id``.  For a finite trace the last label
    is ``None``.  For a lasso, the last label leads back to
    ``steps[loop_start][0]``.
    """

    steps: List[Tuple[int, Optional[int]]]
    loop_start: Optional[int] = None

    @property
    def is_lasso(self) -> bool:
        return self.loop_start is not None

    @property
    def states(self) -> List[int]:
        return [s for s, _ in self.steps]

    def loop_labels(self) -> set:
        if self.loop_start is None:
            return set()
        return {lab for _, lab in self.steps[self.loop_start:]}

    def __len__(self):
        return len(self.steps)


class LabeledGraph:
    def __init__(self, num_states: int, num_labels: int, src, label, dst, props=None):
        self.num_states = int(num_states)
        self.num_labels = int(num_labels)
        self.src = np.asarray(src, dtype=np.int64)
        self.label = np.asarray(label, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.props = dict(props or {})
        if not (len(self.src) == len(self.label) == len(self.dst)):
            raise ValueError("edge arrays differ in length")

    @classmethod
    def from_edges(cls, num_states: int, num_labels: int, edges: Iterable, props=None):
        edges = list(edges)
        arr = np.array(edges, dtype=np.int64).reshape(-1, 3)
        return cls(num_states, num_labels, arr[:, 0], arr[:, 1], arr[:, 2], props)

    initial = 0

    def require_complete(self) -> None:
        """Hook for subclasses whose graphs can be partial."""

    def atom_mask(self, atom) -> np.ndarray:
        if isinstance(atom, Prop):
            try:
                return np.asarray(self.props[atom.name], dtype=bool)
            except KeyError:
                raise KeyError(f"unknown proposition {atom.name!r}") from None
        raise TypeError(f"{type(self).__name__} cannot evaluate {atom!r}")

    def leader_mask(self) -> np.ndarray:
        return np.asarray(self.props.get("leader", np.zeros(self.num_states, bool)), dtype=bool)

    def full(self, value: bool = True) -> np.ndarray:
        return np.full(self.num_states, value, dtype=bool)

    # Edge indices sorted by source (label order within a source) and by target.

    @cached_property
    def _fwd(self):
        order = np.lexsort((self.dst, self.label, self.src))
        indptr = np.searchsorted(self.src[order], np.arange(self.num_states + 1))
        return indptr, order

    @cached_property
    def _rev(self):
        order = np.argsort(self.dst, kind="stable")
        indptr = np.searchsorted(self.dst[order], np.arange(self.num_states + 1))
        return indptr, order

    def out_edges(self, states) -> np.ndarray:
        return _gather(*self._fwd, np.asarray(states, dtype=np.int64))

    def in_edges(self, states) -> np.ndarray:
        return _gather(*self._rev, np.asarray(states, dtype=np.int64))

    def self_loop_only(self) -> np.ndarray:
        """States with at least one edge, all of which are self-loops."""
        moving = np.zeros(self.num_states, dtype=bool)
        moving[self.src[self.src != self.dst]] = True
        has_edge = np.zeros(self.num_states, dtype=bool)
        has_edge[self.src] = True
        return has_edge & ~moving


def _gather(indptr, order, nodes):
    starts = indptr[nodes]
    lens = indptr[nodes + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    base = np.repeat(starts - (np.cumsum(lens) - lens), lens)
    return order[base + np.arange(total)]


# State-set operators.


def pre_exists(g: LabeledGraph, target: np.ndarray) -> np.ndarray:
    """States with some edge into ``target``."""
    out = np.zeros(g.num_states, dtype=bool)
    out[g.src[target[g.dst]]] = True
    return out


def pre_forall(g: LabeledGraph, target: np.ndarray) -> np.ndarray:
    """States all of whose edges lead into ``target`` (vacuous for sinks)."""
    escaping = np.zeros(g.num_states, dtype=bool)
    escaping[g.src[~target[g.dst]]] = True
    return ~escaping


def backward_reach(g: LabeledGraph, seeds: np.ndarray, within: np.ndarray) -> np.ndarray:
    """Least fixpoint of ``Z = seeds | (within & pre_exists(Z))``."""
    reached = seeds.copy()
    frontier = np.flatnonzero(reached)
    while frontier.size:
        cand = g.src[g.in_edges(frontier)]
        cand = cand[within[cand] & ~reached[cand]]
        if not cand.size:
            break
        cand = np.unique(cand)
        reached[cand] = True
        frontier = cand
    return reached


def forall_reach(g: LabeledGraph, seeds: np.ndarray, within: np.ndarray) -> np.ndarray:
    """Least fixpoint of ``Z = seeds | (within & pre_forall(Z))``.

    Counts, per state, the outgoing edges that still leave ``Z``; a state in
    ``within`` joins when the count reaches zero.
    """
    remaining = np.bincount(g.src, minlength=g.num_states).astype(np.int64)
    reached = seeds.copy()
    frontier = np.flatnonzero(reached)
    while frontier.size:
        srcs = g.src[g.in_edges(frontier)]
        if not srcs.size:
            break
        remaining -= np.bincount(srcs, minlength=g.num_states)
        cand = np.unique(srcs)
        cand = cand[(remaining[cand] == 0) & within[cand] & ~reached[cand]]
        reached[cand] = True
        frontier = cand
    return reached


def forall_invariant(g: LabeledGraph, holds: np.ndarray) -> np.ndarray:
    """Greatest fixpoint of ``Z = holds & pre_forall(Z)``: prune states that
    can step out of the candidate set until nothing changes."""
    alive = holds.copy()
    removed = np.flatnonzero(~alive)
    while removed.size:
        preds = g.src[g.in_edges(removed)]
        preds = np.unique(preds[alive[preds]])
        alive[preds] = False
        removed = preds
    return alive


def _components(g: LabeledGraph, within: np.ndarray):
    keep = within[g.src] & within[g.dst]
    es, ed = g.src[keep], g.dst[keep]
    mat = csr_matrix((np.ones(len(es), dtype=np.int8), (es, ed)), shape=(g.num_states, g.num_states))
    _, comp = connected_components(mat, directed=True, connection="strong")
    internal = np.flatnonzero(keep)[comp[es] == comp[ed]]
    return comp, internal


def cycle_core(g: LabeledGraph, within: np.ndarray, fair: bool) -> np.ndarray:
    """States of ``within`` lying on a cycle that stays in ``within``.

    With ``fair`` the cycle must also use every label, i.e. the state's SCC in
    the ``within``-subgraph has internal edges carrying all labels.
    """
    comp, internal = _components(g, within)
    core = np.zeros(g.num_states, dtype=bool)
    if not internal.size:
        return core
    ic = comp[g.src[internal]]
    if fair:
        pairs = np.unique(ic * g.num_labels + g.label[internal])
        counts = np.bincount(pairs // g.num_labels, minlength=comp.max() + 1)
        good = np.flatnonzero(counts == g.num_labels)
    else:
        good = np.unique(ic)
    core[np.isin(comp, good) & within] = True
    return core


def exists_globally(g: LabeledGraph, holds: np.ndarray, fair: bool = False) -> np.ndarray:
    """States with an infinite path inside ``holds`` (visiting every label
    infinitely often when ``fair``)."""
    return backward_reach(g, cycle_core(g, holds, fair), holds)


def fair_states(g: LabeledGraph) -> np.ndarray:
    return exists_globally(g, g.full(), fair=True)


# Paths.


def shortest_path(
    g: LabeledGraph,
    start: int,
    target: np.ndarray,
    within: Optional[np.ndarray] = None,
    min_edges: int = 0,
    max_edges: Optional[int] = None,
) -> Optional[List[int]]:
    """Edge ids of a shortest path from ``start`` to a ``target`` state.

    All visited states stay in ``within``.  With ``min_edges=1`` the path is
    non-empty even if ``start`` is itself a target, so this also finds
    cycles.  Ties resolve by discovery order, so results are deterministic.
    """
    if within is None:
        within = g.full()
    if min_edges == 0 and target[start]:
        return []
    parent = np.full(g.num_states, -1, dtype=np.int64)
    seen = np.zeros(g.num_states, dtype=bool)
    if min_edges == 0:
        seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    depth = 0
    while frontier.size:
        if max_edges is not None and depth >= max_edges:
            return None
        depth += 1
        eids = g.out_edges(frontier)
        dsts = g.dst[eids]
        ok = within[dsts] & ~seen[dsts]
        eids, dsts = eids[ok], dsts[ok]
        if not eids.size:
            return None
        dsts, first = np.unique(dsts, return_index=True)
        eids = eids[first]
        seen[dsts] = True
        parent[dsts] = eids
        hit = dsts[target[dsts]]
        if hit.size:
            # Earliest-discovered hit, for determinism.
            order = np.argsort(first[target[dsts]], kind="stable")
            return _unwind(g, parent, start, int(hit[order[0]]))
        frontier = dsts[np.argsort(first, kind="stable")]
    return None


def _unwind(g, parent, start, end):
    path = []
    cur = end
    while True:
        e = int(parent[cur])
        path.append(e)
        cur = int(g.src[e])
        if cur == start:
            break
    path.reverse()
    return path


def _path_steps(g: LabeledGraph, start: int, eids: Sequence[int]):
    steps = []
    cur = start
    for e in eids:
        steps.append((cur, int(g.label[e])))
        cur = int(g.dst[e])
    return steps, cur


def finite_trace(g: LabeledGraph, start: int, target: np.ndarray, within=None, max_edges=None) -> Optional[Trace]:
    eids = shortest_path(g, start, target, within, max_edges=max_edges)
    if eids is None:
        return None
    steps, end = _path_steps(g, start, eids)
    steps.append((end, None))
    return Trace(steps)


def lasso(g: LabeledGraph, start: int, within: np.ndarray, fair: bool) -> Optional[Trace]:
    """A lasso from ``start`` whose every state lies in ``within``.

    Without ``fair`` the loop is a shortest cycle (a self-loop when one
    exists).  With ``fair`` the loop visits an edge of every label.
    """
    comp, internal = _components(g, within)
    core = cycle_core(g, within, fair)
    reach = backward_reach(g, core, within)
    if not reach[start]:
        return None
    prefix = shortest_path(g, start, core, within)
    steps, anchor = _path_steps(g, start, prefix)
    in_comp = within & (comp == comp[anchor])
    if not fair:
        loop = shortest_path(g, anchor, _single(g, anchor), in_comp, min_edges=1)
    else:
        internal_mask = np.zeros(len(g.src), dtype=bool)
        internal_mask[internal] = True
        loop = _covering_cycle(g, anchor, in_comp, internal_mask)
    loop_steps, end = _path_steps(g, anchor, loop)
    assert end == anchor
    loop_start = len(steps)
    return Trace(steps + loop_steps, loop_start)


def _single(g, s):
    m = np.zeros(g.num_states, dtype=bool)
    m[s] = True
    return m


def _covering_cycle(g, anchor, in_comp, internal_mask):
    """Closed walk from ``anchor`` inside one SCC that uses every label."""
    walk = []
    covered = set()
    cur = anchor
    for lab in range(g.num_labels):
        if lab in covered:
            continue
        sources = np.zeros(g.num_states, dtype=bool)
        cand = np.flatnonzero(internal_mask & (g.label == lab))
        sources[g.src[cand]] = True
        hop = shortest_path(g, cur, sources, in_comp)
        walk += hop
        _, cur = _path_steps(g, cur, hop)
        e = int(cand[np.flatnonzero(g.src[cand] == cur)[0]])
        walk.append(e)
        cur = int(g.dst[e])
        covered.update(int(g.label[x]) for x in hop)
        covered.add(lab)
    walk += shortest_path(g, cur, _single(g, anchor), in_comp)
    return walk
