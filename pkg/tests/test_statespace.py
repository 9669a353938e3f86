import itertools
import json
import random
from collections import deque
from pathlib import Path

import numpy as np
import pytest

from ringelect import (
    ExploreLimits,
    GlobalState,
    LocalState,
    Outcome,
    Pc,
    Variant,
    explore,
    find_trace_to,
    initial_state,
    leader_set,
    quiescent_states,
    step,
    successors,
)
from ringelect.errors import StateLimitExceeded, TruncatedGraph
from ringelect.graph import LabeledGraph
from ringelect.simulate import sync_oracle

GOLDEN = json.loads((Path(__file__).parent / "golden" / "reachable_counts.json").read_text())


def object_bfs(variant, uids):
    """Reference exploration over the object-level semantics."""
    start = initial_state(variant, uids)
    seen = {start: 0}
    order = [start]
    edges = []
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for label, nxt in successors(variant, g):
            assert nxt is not Outcome.OVERFLOW
            if nxt not in seen:
                seen[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            edges.append((seen[g], label, seen[nxt]))
    return order, edges


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_matches_object_level_bfs(variant, n):
    uids = list(range(n))[::-1]
    graph, stats = explore(variant, uids)
    order, edges = object_bfs(variant, uids)
    assert [graph.state(s) for s in range(graph.num_states)] == order
    assert sorted(zip(graph.src.tolist(), graph.label.tolist(), graph.dst.tolist())) == sorted(edges)


@pytest.mark.parametrize("key", sorted(GOLDEN))
def test_golden_counts(key):
    name, n = key.split("/")
    _, stats = explore(Variant.parse(name), list(range(int(n))))
    got = {"reachable_states": stats.reachable_states, "transitions": stats.transitions,
           "self_loops": stats.self_loops}
    assert got == GOLDEN[key]


@pytest.mark.parametrize("variant", list(Variant))
def test_closure_on_sample(variant):
    graph, _ = explore(variant, [2, 0, 3, 1])
    rng = random.Random(5)
    for sid in rng.sample(range(graph.num_states), max(1, graph.num_states // 10)):
        g = graph.state(sid)
        for i in range(graph.n):
            res = step(variant, g, i)
            target = graph.state(int(graph.succ[sid, i]))
            assert target == (g if res.outcome is Outcome.STUTTER else res.next)


def test_reproducible():
    a, sa = explore(Variant.GENERAL, [1, 3, 0, 2])
    b, sb = explore(Variant.GENERAL, [1, 3, 0, 2])
    assert sa == sb
    assert np.array_equal(a.succ, b.succ)
    assert a._codes == b._codes


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_totality(variant, n):
    graph, stats = explore(variant, list(range(n)))
    assert stats.transitions + stats.self_loops == n * stats.reachable_states
    assert (graph.succ >= 0).all()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_variant_reduction_is_monotone(n):
    counts = [explore(v, list(range(n)))[1].reachable_states
              for v in (Variant.EXTRA, Variant.MODIFIED, Variant.GENERAL)]
    assert counts[0] <= counts[1] <= counts[2]
    if n >= 3:
        assert counts[0] < counts[2]


def test_extra_is_smaller_than_modified_for_three():
    assert explore(Variant.EXTRA, [0, 1, 2])[1].reachable_states < \
        explore(Variant.MODIFIED, [0, 1, 2])[1].reachable_states


def test_modified_two_nodes():
    graph, stats = explore(Variant.MODIFIED, [0, 1])
    sizes = [len(leader_set(g)) for _, g in graph.states()]
    assert max(sizes) == 1
    assert stats.quiescent_nonleader == 0


@pytest.mark.parametrize("variant", list(Variant))
def test_single_node_graph(variant):
    graph, stats = explore(variant, [0])
    assert stats.reachable_states == 4
    assert leader_set(graph.state(3)) == {0}
    q = quiescent_states(graph)
    assert q.with_leader == [3] and q.without_leader == []


def test_general_never_overflows_at_desk_scale():
    for n in (2, 3, 4):
        for perm in itertools.permutations(range(n)):
            graph, _ = explore(Variant.GENERAL, perm)
            assert not graph.overflow_reached


def test_overflow_state_is_detected_by_step():
    full = LocalState(vid=0, pc=Pc.S2, inbox=(1, 2, 0))
    g = GlobalState((LocalState(vid=2), full, LocalState(vid=1, pc=Pc.S2)))
    assert step(Variant.GENERAL, g, 0).outcome is Outcome.OVERFLOW
    assert successors(Variant.GENERAL, g)[0] == (0, Outcome.OVERFLOW)


def test_state_limit():
    with pytest.raises(StateLimitExceeded) as info:
        explore(Variant.GENERAL, [0, 1, 2, 3], ExploreLimits(max_states=40))
    graph = info.value.graph
    assert graph.truncated and graph.num_states <= 40
    with pytest.raises(TruncatedGraph):
        quiescent_states(graph)


def test_stats_dict_layout():
    graph, stats = explore(Variant.EXTRA, [1, 0])
    assert list(stats.to_dict(graph)) == ["variant", "n", "uids", "reachable_states", "transitions",
                                          "self_loops", "quiescent_nonleader", "peak_frontier"]


def test_trace_to_leader():
    graph, _ = explore(Variant.MODIFIED, [0, 1])
    trace = find_trace_to(graph, lambda g: bool(leader_set(g)))
    assert trace is not None
    last = trace.steps[-1][0]
    assert leader_set(graph.state(last))
    for (s, lab), (t, _) in zip(trace.steps, trace.steps[1:]):
        assert graph.succ[s, lab] == t


def test_no_trace_to_two_leaders():
    graph, _ = explore(Variant.MODIFIED, [0, 1, 2])
    assert find_trace_to(graph, lambda g: len(leader_set(g)) >= 2) is None


def test_trace_to_true_is_empty():
    graph, _ = explore(Variant.MODIFIED, [0, 1, 2])
    trace = find_trace_to(graph, lambda g: True)
    assert trace.states == [0]


def test_trace_respects_step_budget():
    graph, _ = explore(Variant.MODIFIED, [0, 1, 2])
    assert find_trace_to(graph, graph.leader_mask(), ExploreLimits(max_steps_per_trace=1)) is None


def test_quiescent_modified_three():
    graph, _ = explore(Variant.MODIFIED, [0, 1, 2])
    q = quiescent_states(graph)
    assert q.without_leader == []
    assert len(q.with_leader) >= 1


def test_hand_built_two_state_graph():
    g = LabeledGraph.from_edges(2, 1, [(0, 0, 1), (1, 0, 1)])
    q = quiescent_states(g)
    assert q.all == [1]


@pytest.mark.parametrize("variant", [Variant.MODIFIED, Variant.EXTRA])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_terminal_state_elects_oracle_winner(variant, n):
    for perm in itertools.permutations(range(n)):
        graph, _ = explore(variant, perm)
        winner = sync_oracle(perm).winner
        for sid in quiescent_states(graph).all:
            assert leader_set(graph.state(sid)) == {winner}
